#include "lungpipe/svm.hpp"

#include <cmath>

#include "lungpipe/errors.hpp"

namespace lungpipe {

std::string to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::inner_product:
        return "inner_product";
    case KernelKind::polynomial:
        return "polynomial";
    case KernelKind::radial:
        return "radial";
    }
    return "radial";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "inner_product" || name == "linear")
        return KernelKind::inner_product;
    if (name == "polynomial")
        return KernelKind::polynomial;
    if (name == "radial")
        return KernelKind::radial;
    throw argument_error("unknown kernel '" + name + "'");
}

double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& z) {
    if (x.size() != z.size())
        throw argument_error("kernel_eval: vector lengths differ");
    switch (spec.kind) {
    case KernelKind::inner_product: {
        double acc = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += x[i] * z[i];
        return acc;
    }
    case KernelKind::polynomial: {
        if (spec.degree < 1)
            throw argument_error("kernel_eval: polynomial degree must be >= 1");
        double acc = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += x[i] * z[i];
        return std::pow(1.0 + acc, spec.degree);
    }
    case KernelKind::radial: {
        if (!(spec.gamma > 0))
            throw argument_error("kernel_eval: gamma must be positive");
        double d2 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - z[i];
            d2 += d * d;
        }
        return std::exp(-spec.gamma * d2);
    }
    }
    throw argument_error("kernel_eval: bad kernel kind");
}

namespace {

constexpr double kTol = 1e-3;  // KKT tolerance
constexpr double kEps = 1e-10; // minimal useful alpha step

// Platt's SMO over a precomputed kernel matrix, with a full error cache.
struct Smo {
    const Matrix& x;
    std::vector<double> y; // +-1
    double cost;
    Matrix k;
    std::vector<double> alpha, err;
    double b = 0;
    std::size_t n;

    Smo(const StandardizedDesign& design, const KernelSpec& spec, double c)
        : x(design.x), cost(c), n(design.n()) {
        y.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = design.y[i] ? 1.0 : -1.0;
        k = Matrix(n, n);
        std::vector<double> xi(x.cols), xj(x.cols);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c2 = 0; c2 < x.cols; ++c2)
                xi[c2] = x(i, c2);
            for (std::size_t j = 0; j <= i; ++j) {
                for (std::size_t c2 = 0; c2 < x.cols; ++c2)
                    xj[c2] = x(j, c2);
                const double v = kernel_eval(spec, xi, xj);
                k(i, j) = v;
                k(j, i) = v;
            }
        }
        alpha.assign(n, 0.0);
        err.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            err[i] = -y[i]; // f is identically 0 at the start
    }

    bool non_bound(std::size_t i) const { return alpha[i] > 0 && alpha[i] < cost; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2)
            return false;
        const double a1o = alpha[i1], a2o = alpha[i2];
        const double y1 = y[i1], y2 = y[i2];
        const double e1 = err[i1], e2 = err[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (s > 0) {
            lo = std::max(0.0, a1o + a2o - cost);
            hi = std::min(cost, a1o + a2o);
        } else {
            lo = std::max(0.0, a2o - a1o);
            hi = std::min(cost, cost + a2o - a1o);
        }
        if (lo >= hi)
            return false;

        const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0) {
            a2 = a2o + y2 * (e1 - e2) / eta;
            a2 = std::min(hi, std::max(lo, a2));
        } else {
            // flat or concave direction: take the better endpoint of the
            // clipped dual objective
            const double f1 = y1 * (e1 - b) - a1o * k11 - s * a2o * k12;
            const double f2 = y2 * (e2 - b) - s * a1o * k12 - a2o * k22;
            const double l1 = a1o + s * (a2o - lo);
            const double h1 = a1o + s * (a2o - hi);
            const double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                                s * lo * l1 * k12;
            const double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                                s * hi * h1 * k12;
            if (lobj < hobj - kEps)
                a2 = lo;
            else if (lobj > hobj + kEps)
                a2 = hi;
            else
                a2 = a2o;
        }
        if (std::abs(a2 - a2o) < kEps * (a2 + a2o + kEps))
            return false;

        double a1 = a1o + s * (a2o - a2);
        if (a1 < 0)
            a1 = 0;
        else if (a1 > cost)
            a1 = cost;

        const double d1 = a1 - a1o, d2 = a2 - a2o;
        const double b1 = b - e1 - y1 * d1 * k11 - y2 * d2 * k12;
        const double b2 = b - e2 - y1 * d1 * k12 - y2 * d2 * k22;
        double bnew;
        if (a1 > 0 && a1 < cost)
            bnew = b1;
        else if (a2 > 0 && a2 < cost)
            bnew = b2;
        else
            bnew = (b1 + b2) / 2.0;

        const double db = bnew - b;
        for (std::size_t j = 0; j < n; ++j)
            err[j] += y1 * d1 * k(i1, j) + y2 * d2 * k(i2, j) + db;
        alpha[i1] = a1;
        alpha[i2] = a2;
        b = bnew;
        return true;
    }

    int examine(std::size_t i2) {
        const double y2 = y[i2], a2 = alpha[i2], e2 = err[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -kTol && a2 < cost) || (r2 > kTol && a2 > 0)))
            return 0;

        // heuristic: non-bound partner maximizing |E1 - E2|
        bool have = false;
        std::size_t pick = 0;
        double gap = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (!non_bound(i))
                continue;
            const double g = std::abs(err[i] - e2);
            if (g > gap) {
                gap = g;
                pick = i;
                have = true;
            }
        }
        if (have && take_step(pick, i2))
            return 1;
        for (std::size_t i = 0; i < n; ++i)
            if (non_bound(i) && take_step(i, i2))
                return 1;
        for (std::size_t i = 0; i < n; ++i)
            if (take_step(i, i2))
                return 1;
        return 0;
    }

    int solve() {
        int epochs = 0;
        const int cap = 10000;
        bool examine_all = true;
        int changed = 0;
        while (changed > 0 || examine_all) {
            if (++epochs > cap)
                throw numeric_error("fit_svm: no convergence after " + std::to_string(cap) +
                                    " epochs");
            changed = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (examine_all || non_bound(i))
                    changed += examine(i);
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
        return epochs;
    }
};

} // namespace

SvmModel fit_svm(const StandardizedDesign& design, const KernelSpec& spec, double cost) {
    if (!(cost > 0))
        throw argument_error("fit_svm: cost must be positive");
    bool any0 = false, any1 = false;
    for (int yi : design.y)
        (yi ? any1 : any0) = true;
    if (!any0 || !any1)
        throw argument_error("fit_svm: both classes must be present");
    if (spec.kind == KernelKind::radial && !(spec.gamma > 0))
        throw argument_error("fit_svm: gamma must be positive");
    if (spec.kind == KernelKind::polynomial && spec.degree < 1)
        throw argument_error("fit_svm: polynomial degree must be >= 1");

    Smo smo(design, spec, cost);
    const int epochs = smo.solve();

    // settle the bias on the free support vectors when there are any
    double bias_sum = 0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < smo.n; ++i) {
        if (!smo.non_bound(i))
            continue;
        double f = 0;
        for (std::size_t j = 0; j < smo.n; ++j)
            f += smo.alpha[j] * smo.y[j] * smo.k(i, j);
        bias_sum += smo.y[i] - f;
        ++free_count;
    }
    const double bias = free_count ? bias_sum / static_cast<double>(free_count) : smo.b;

    SvmModel model;
    model.kernel = spec;
    model.cost = cost;
    model.bias = bias;
    model.epochs = epochs;
    std::vector<std::size_t> svs;
    for (std::size_t i = 0; i < smo.n; ++i)
        if (smo.alpha[i] > 0)
            svs.push_back(i);
    model.support_vectors = Matrix(svs.size(), design.p());
    for (std::size_t r = 0; r < svs.size(); ++r) {
        for (std::size_t c = 0; c < design.p(); ++c)
            model.support_vectors(r, c) = design.x(svs[r], c);
        model.alpha.push_back(smo.alpha[svs[r]]);
        model.sv_labels.push_back(design.y[svs[r]] ? 1 : -1);
    }
    return model;
}

double svm_decision(const SvmModel& model, const std::vector<double>& x) {
    if (x.size() != model.support_vectors.cols && model.support_vectors.rows > 0)
        throw argument_error("svm_decision: row width mismatch");
    double f = model.bias;
    std::vector<double> sv(model.support_vectors.cols);
    for (std::size_t i = 0; i < model.support_vectors.rows; ++i) {
        for (std::size_t c = 0; c < model.support_vectors.cols; ++c)
            sv[c] = model.support_vectors(i, c);
        f += model.alpha[i] * model.sv_labels[i] * kernel_eval(model.kernel, x, sv);
    }
    return f;
}

int predict_svm(const SvmModel& model, const std::vector<double>& x) {
    return svm_decision(model, x) > 0 ? 1 : 0;
}

SvmTuneResult tune_svm(const StandardizedDesign& design, KernelKind kind,
                       const std::vector<std::pair<double, double>>& grid, int folds,
                       std::uint64_t seed) {
    if (grid.empty())
        throw argument_error("tune_svm: empty grid");
    if (folds < 2)
        throw argument_error("tune_svm: need at least 2 folds");

    Rng rng(seed);
    const std::vector<int> fold_of = stratified_folds(design.y, folds, rng);
    const std::size_t n = design.n();

    SvmTuneResult result;
    std::size_t best_correct = 0;
    bool have_best = false;
    for (const auto& [cost, gamma] : grid) {
        KernelSpec spec;
        spec.kind = kind;
        spec.gamma = gamma;

        std::size_t correct = 0;
        for (int v = 0; v < folds; ++v) {
            StandardizedDesign sub;
            sub.feature_names = design.feature_names;
            std::vector<std::size_t> train_rows;
            for (std::size_t i = 0; i < n; ++i)
                if (fold_of[i] != v)
                    train_rows.push_back(i);
            sub.x = Matrix(train_rows.size(), design.p());
            for (std::size_t r = 0; r < train_rows.size(); ++r) {
                for (std::size_t c = 0; c < design.p(); ++c)
                    sub.x(r, c) = design.x(train_rows[r], c);
                sub.y.push_back(design.y[train_rows[r]]);
            }
            const SvmModel model = fit_svm(sub, spec, cost);
            std::vector<double> row(design.p());
            for (std::size_t i = 0; i < n; ++i) {
                if (fold_of[i] != v)
                    continue;
                for (std::size_t c = 0; c < design.p(); ++c)
                    row[c] = design.x(i, c);
                correct += predict_svm(model, row) == design.y[i];
            }
        }

        const double accuracy = static_cast<double>(correct) / static_cast<double>(n);
        result.table.push_back({cost, gamma, accuracy});
        const bool wins =
            !have_best || correct > best_correct ||
            (correct == best_correct &&
             (cost < result.best_cost ||
              (cost == result.best_cost && gamma < result.best_gamma)));
        if (wins) {
            best_correct = correct;
            result.best_cost = cost;
            result.best_gamma = gamma;
            have_best = true;
        }
    }
    return result;
}

} // namespace lungpipe
