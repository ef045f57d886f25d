#pragma once

#include <cstdint>
#include <vector>

#include "lungpipe/dataset.hpp"

namespace lungpipe {

struct KMeansModel {
    Matrix centroids;                  // K x p
    std::vector<int> cluster_to_label; // fitted on the training assignments
    double objective = 0;              // sum over clusters of W(C_k), see below
    std::vector<int> assignments;      // training rows, kept run
    std::vector<double> objective_trace; // per Lloyd iteration of the kept run
    std::uint64_t seed = 0;
    int restarts = 1;
};

/// Lloyd iterations from k-means++ seeding, best of `restarts` runs kept.
/// The objective is sum_k W(C_k) with W(C_k) the mean over cluster pairs of
/// squared distances, which equals twice the within-cluster SSE. An emptied
/// cluster is re-seeded at the point farthest from its assigned centroid.
KMeansModel fit_kmeans(const StandardizedDesign& design, int k, std::uint64_t seed, int restarts);

/// Nearest centroid, ties to the lowest cluster id.
int assign_cluster(const KMeansModel& model, const std::vector<double>& x);

/// Label of the assigned cluster under the fitted cluster-to-label map.
int predict_kmeans(const KMeansModel& model, const std::vector<double>& x);

/// Accuracy of the better of the two cluster-to-label bijections on the given
/// rows. Requires K = 2.
double kmeans_accuracy(const KMeansModel& model, const StandardizedDesign& design);

} // namespace lungpipe
