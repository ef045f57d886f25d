#pragma once

#include <vector>

#include "lungpipe/dataset.hpp"

namespace lungpipe {

struct LogisticModel {
    double intercept = 0;
    std::vector<double> coefficients;
    bool converged = false;
    bool ridged = false; // weighted system needed 1e-8 regularization
    int iterations = 0;
};

/// Maximum-likelihood fit by iteratively reweighted least squares.
/// Convergence when max |delta beta| < 1e-8, capped at 100 iterations;
/// a cap hit (e.g. perfect separation) returns the last iterate with
/// `converged` false rather than failing.
LogisticModel fit_logistic(const StandardizedDesign& design);

/// P(y = 1 | x) for a row in the model's predictor space.
double predict_logistic(const LogisticModel& model, const std::vector<double>& x);

} // namespace lungpipe
