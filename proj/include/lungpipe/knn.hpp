#pragma once

#include <vector>

#include "lungpipe/dataset.hpp"

namespace lungpipe {

/// Nearest neighbours just memorize the (standardized) training set.
struct KnnModel {
    Matrix train_x;
    std::vector<int> train_y;
    int k = 1;
};

KnnModel fit_knn(const StandardizedDesign& design, int k);

/// Majority vote of the k nearest by Euclidean distance. Distance ties break
/// by training-row index; an even vote goes to class 0.
int predict_knn(const KnnModel& model, const std::vector<double>& x);

} // namespace lungpipe
