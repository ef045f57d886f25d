#pragma once

#include <array>
#include <vector>

#include "lungpipe/dataset.hpp"
#include "lungpipe/linalg.hpp"

namespace lungpipe {

struct LdaModel {
    std::array<std::vector<double>, 2> means;
    Matrix covariance; // pooled, includes any ridge applied
    std::array<double, 2> priors{};
    bool ridged = false;
};

struct QdaModel {
    std::array<std::vector<double>, 2> means;
    std::array<Matrix, 2> covariances;
    std::array<double, 2> priors{};
    bool ridged = false;
};

/// Pooled-covariance discriminant. Singular covariance gets a ridge of
/// 1e-6 * trace / p, recorded in `ridged`.
LdaModel fit_lda(const StandardizedDesign& design);

/// delta_k(x) = x' S^-1 mu_k - mu_k' S^-1 mu_k / 2 + ln pi_k.
std::array<double, 2> discriminant_lda(const LdaModel& model, const std::vector<double>& x);

int predict_lda(const LdaModel& model, const std::vector<double>& x);

/// Per-class covariance discriminant; same ridge policy per class.
QdaModel fit_qda(const StandardizedDesign& design);

/// delta_k(x) = -(x-mu_k)' S_k^-1 (x-mu_k)/2 - ln|S_k|/2 + ln pi_k
/// (equal to the expanded quadratic form in the usual statement).
std::array<double, 2> discriminant_qda(const QdaModel& model, const std::vector<double>& x);

int predict_qda(const QdaModel& model, const std::vector<double>& x);

} // namespace lungpipe
