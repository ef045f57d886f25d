#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lungpipe/features.hpp"
#include "lungpipe/linalg.hpp"
#include "lungpipe/rng.hpp"

namespace lungpipe {

/// Names of the six default predictors, in table column order.
const std::vector<std::string>& all_predictors();

/// The reduced predictor set: entropy, stddev, perimeter.
const std::vector<std::string>& three_predictors();

/// Numeric training data lifted out of a FeatureTable.
struct Dataset {
    Matrix x; // n rows, one column per predictor
    std::vector<int> y;
    std::vector<std::string> ids;
    std::vector<std::string> feature_names;

    std::size_t n() const { return x.rows; }
    std::size_t p() const { return x.cols; }
};

/// Extracts the named predictor columns and the labels. Rows lacking a
/// requested feature (degenerate skewness/kurtosis) or a label are rejected.
Dataset make_dataset(const FeatureTable& table, const std::vector<std::string>& predictors);

/// One predictor row from a record, in the given column order.
std::vector<double> record_row(const FeatureRecord& rec, const std::vector<std::string>& predictors);

/// Column-wise affine transform fitted on training data and replayed on
/// anything scored later.
struct Standardizer {
    std::vector<std::string> feature_names;
    std::vector<double> means;
    std::vector<double> stddevs; // population

    std::vector<double> apply_row(const std::vector<double>& row) const;
    Matrix apply(const Matrix& x) const;
};

/// Predictor matrix ready for fitting. `scaler` is present when the columns
/// were standardized; distance- and scale-sensitive models require that,
/// trees do not.
struct StandardizedDesign {
    Matrix x;
    std::vector<int> y;
    std::vector<std::string> feature_names;
    std::optional<Standardizer> scaler;

    std::size_t n() const { return x.rows; }
    std::size_t p() const { return x.cols; }
};

/// Zero-mean unit-variance columns (population sigma). Constant columns are
/// rejected with an error naming the column.
StandardizedDesign standardize(const Dataset& data);

/// The raw columns, no transform recorded.
StandardizedDesign raw_design(const Dataset& data);

/// Class-stratified fold id in [0, folds) per row; within each class the
/// assignment is a seeded shuffle dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& y, int folds, Rng& rng);

} // namespace lungpipe
