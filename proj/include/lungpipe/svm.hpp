#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lungpipe/dataset.hpp"

namespace lungpipe {

enum class KernelKind { inner_product, polynomial, radial };

struct KernelSpec {
    KernelKind kind = KernelKind::radial;
    int degree = 3;     // polynomial only
    double gamma = 1.0; // radial only
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// inner-product: <x,z>; polynomial: (1 + <x,z>)^d; radial: exp(-gamma ||x-z||^2).
double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& z);

struct SvmModel {
    KernelSpec kernel;
    double cost = 1.0;
    Matrix support_vectors;        // rows with alpha > 0
    std::vector<double> alpha;     // in [0, cost]
    std::vector<int> sv_labels;    // +-1
    double bias = 0;
    int epochs = 0;                // outer SMO passes used
};

/// Soft-margin dual solved by sequential minimal optimization (KKT tolerance
/// 1e-3). Labels are mapped to +-1 internally. Non-convergence within the
/// epoch cap raises an error carrying the count.
SvmModel fit_svm(const StandardizedDesign& design, const KernelSpec& spec, double cost);

/// f(x) = sum_i alpha_i y_i K(x, x_i) + bias.
double svm_decision(const SvmModel& model, const std::vector<double>& x);

/// 1 when the decision value is positive, else 0.
int predict_svm(const SvmModel& model, const std::vector<double>& x);

struct SvmTuneResult {
    double best_cost = 0;
    double best_gamma = 0;
    // one row per grid point: cost, gamma, pooled CV accuracy
    struct Row {
        double cost, gamma, accuracy;
    };
    std::vector<Row> table;
};

/// Stratified V-fold CV accuracy over the (cost, gamma) grid; ties prefer
/// smaller cost, then smaller gamma.
SvmTuneResult tune_svm(const StandardizedDesign& design, KernelKind kind,
                       const std::vector<std::pair<double, double>>& grid, int folds,
                       std::uint64_t seed);

} // namespace lungpipe
