#include "lungpipe/logistic.hpp"

#include <cmath>

#include "lungpipe/errors.hpp"
#include "lungpipe/linalg.hpp"

namespace lungpipe {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

LogisticModel fit_logistic(const StandardizedDesign& design) {
    const std::size_t n = design.n();
    const std::size_t p = design.p();
    bool any0 = false, any1 = false;
    for (int yi : design.y)
        (yi ? any1 : any0) = true;
    if (!any0 || !any1)
        throw argument_error("fit_logistic: labels are all identical");

    std::vector<double> beta(p + 1, 0.0); // intercept first
    LogisticModel model;

    for (int iter = 0; iter < 100; ++iter) {
        // gradient X^T (y - p) and Hessian X^T W X on the intercept-augmented design
        std::vector<double> grad(p + 1, 0.0);
        Matrix hess(p + 1, p + 1);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = beta[0];
            for (std::size_t j = 0; j < p; ++j)
                eta += beta[j + 1] * design.x(i, j);
            double pi = sigmoid(eta);
            pi = std::min(1.0 - 1e-10, std::max(1e-10, pi));
            const double w = pi * (1.0 - pi);
            const double resid = design.y[i] - pi;

            grad[0] += resid;
            hess(0, 0) += w;
            for (std::size_t j = 0; j < p; ++j) {
                const double xij = design.x(i, j);
                grad[j + 1] += xij * resid;
                hess(0, j + 1) += w * xij;
                hess(j + 1, 0) += w * xij;
                for (std::size_t k = 0; k < p; ++k)
                    hess(j + 1, k + 1) += w * xij * design.x(i, k);
            }
        }

        std::vector<double> delta;
        Cholesky chol = cholesky(hess);
        if (!chol.ok) {
            for (std::size_t j = 0; j <= p; ++j)
                hess(j, j) += 1e-8;
            model.ridged = true;
            chol = cholesky(hess);
            if (!chol.ok)
                throw numeric_error("fit_logistic: weighted system singular");
        }
        delta = cholesky_solve(chol, grad);

        double max_step = 0;
        for (std::size_t j = 0; j <= p; ++j) {
            beta[j] += delta[j];
            max_step = std::max(max_step, std::abs(delta[j]));
        }
        model.iterations = iter + 1;
        if (max_step < 1e-8) {
            model.converged = true;
            break;
        }
    }

    model.intercept = beta[0];
    model.coefficients.assign(beta.begin() + 1, beta.end());
    return model;
}

double predict_logistic(const LogisticModel& model, const std::vector<double>& x) {
    if (x.size() != model.coefficients.size())
        throw argument_error("predict_logistic: row width mismatch");
    double eta = model.intercept;
    for (std::size_t j = 0; j < x.size(); ++j)
        eta += model.coefficients[j] * x[j];
    return sigmoid(eta);
}

} // namespace lungpipe
