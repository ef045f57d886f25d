#include "lungpipe/discriminant.hpp"

#include <cmath>

#include "lungpipe/errors.hpp"

namespace lungpipe {

namespace {

struct ClassSplit {
    std::array<std::vector<std::size_t>, 2> rows;
};

ClassSplit split_classes(const StandardizedDesign& design) {
    ClassSplit s;
    for (std::size_t i = 0; i < design.n(); ++i)
        s.rows[static_cast<std::size_t>(design.y[i])].push_back(i);
    return s;
}

std::vector<double> class_mean(const StandardizedDesign& design,
                               const std::vector<std::size_t>& rows) {
    std::vector<double> mu(design.p(), 0.0);
    for (std::size_t i : rows)
        for (std::size_t j = 0; j < design.p(); ++j)
            mu[j] += design.x(i, j);
    for (double& v : mu)
        v /= static_cast<double>(rows.size());
    return mu;
}

// Sum of (x - mu)(x - mu)^T over the rows, accumulated into `scatter`.
void accumulate_scatter(const StandardizedDesign& design, const std::vector<std::size_t>& rows,
                        const std::vector<double>& mu, Matrix& scatter) {
    const std::size_t p = design.p();
    std::vector<double> d(p);
    for (std::size_t i : rows) {
        for (std::size_t j = 0; j < p; ++j)
            d[j] = design.x(i, j) - mu[j];
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k)
                scatter(j, k) += d[j] * d[k];
    }
}

// Factors `cov`, applying the 1e-6 * trace / p ridge in place if needed.
Cholesky factor_with_ridge(Matrix& cov, bool& ridged, const char* who) {
    Cholesky chol = cholesky(cov);
    if (chol.ok)
        return chol;
    double trace = 0;
    for (std::size_t j = 0; j < cov.rows; ++j)
        trace += cov(j, j);
    const double lambda = 1e-6 * trace / static_cast<double>(cov.rows);
    for (std::size_t j = 0; j < cov.rows; ++j)
        cov(j, j) += lambda;
    ridged = true;
    chol = cholesky(cov);
    if (!chol.ok)
        throw numeric_error(std::string(who) + ": covariance singular even after ridge");
    return chol;
}

} // namespace

LdaModel fit_lda(const StandardizedDesign& design) {
    const auto split = split_classes(design);
    for (int k = 0; k < 2; ++k)
        if (split.rows[k].size() < 2)
            throw argument_error("fit_lda: need at least 2 samples per class");

    LdaModel model;
    const std::size_t p = design.p();
    Matrix scatter(p, p);
    for (int k = 0; k < 2; ++k) {
        model.means[k] = class_mean(design, split.rows[k]);
        model.priors[k] =
            static_cast<double>(split.rows[k].size()) / static_cast<double>(design.n());
        accumulate_scatter(design, split.rows[k], model.means[k], scatter);
    }
    model.covariance = Matrix(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k)
            model.covariance(j, k) = scatter(j, k) / static_cast<double>(design.n() - 2);

    factor_with_ridge(model.covariance, model.ridged, "fit_lda");
    return model;
}

std::array<double, 2> discriminant_lda(const LdaModel& model, const std::vector<double>& x) {
    if (x.size() != model.means[0].size())
        throw argument_error("discriminant_lda: row width mismatch");
    const Cholesky chol = cholesky(model.covariance);
    if (!chol.ok)
        throw numeric_error("discriminant_lda: stored covariance not positive definite");
    std::array<double, 2> scores{};
    for (int k = 0; k < 2; ++k) {
        const auto s = cholesky_solve(chol, model.means[k]);
        scores[k] = dot(x, s) - 0.5 * dot(model.means[k], s) + std::log(model.priors[k]);
    }
    return scores;
}

int predict_lda(const LdaModel& model, const std::vector<double>& x) {
    const auto scores = discriminant_lda(model, x);
    return scores[1] > scores[0] ? 1 : 0;
}

QdaModel fit_qda(const StandardizedDesign& design) {
    const auto split = split_classes(design);
    const std::size_t p = design.p();
    for (int k = 0; k < 2; ++k)
        if (split.rows[k].size() < p + 1)
            throw argument_error("fit_qda: need at least p + 1 samples per class");

    QdaModel model;
    for (int k = 0; k < 2; ++k) {
        model.means[k] = class_mean(design, split.rows[k]);
        model.priors[k] =
            static_cast<double>(split.rows[k].size()) / static_cast<double>(design.n());
        Matrix scatter(p, p);
        accumulate_scatter(design, split.rows[k], model.means[k], scatter);
        model.covariances[k] = Matrix(p, p);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t l = 0; l < p; ++l)
                model.covariances[k](j, l) =
                    scatter(j, l) / static_cast<double>(split.rows[k].size() - 1);
        factor_with_ridge(model.covariances[k], model.ridged, "fit_qda");
    }
    return model;
}

std::array<double, 2> discriminant_qda(const QdaModel& model, const std::vector<double>& x) {
    if (x.size() != model.means[0].size())
        throw argument_error("discriminant_qda: row width mismatch");
    std::array<double, 2> scores{};
    std::vector<double> d(x.size());
    for (int k = 0; k < 2; ++k) {
        const Cholesky chol = cholesky(model.covariances[k]);
        if (!chol.ok)
            throw numeric_error("discriminant_qda: stored covariance not positive definite");
        for (std::size_t j = 0; j < x.size(); ++j)
            d[j] = x[j] - model.means[k][j];
        scores[k] = -0.5 * quad_form_inv(chol, d) - 0.5 * chol.log_det +
                    std::log(model.priors[k]);
    }
    return scores;
}

int predict_qda(const QdaModel& model, const std::vector<double>& x) {
    const auto scores = discriminant_qda(model, x);
    return scores[1] > scores[0] ? 1 : 0;
}

} // namespace lungpipe
