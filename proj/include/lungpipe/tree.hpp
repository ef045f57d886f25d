#pragma once

#include <cstdint>
#include <vector>

#include "lungpipe/dataset.hpp"
#include "lungpipe/rng.hpp"

namespace lungpipe {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    int klass = 0;           // majority class here, ties to 0
    double p0 = 1, p1 = 0;   // training class proportions
    std::size_t n0 = 0, n1 = 0;
};

struct TreeOptions {
    int min_leaf_size = 1;
    int max_depth = 64;
};

struct TreeModel {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    std::size_t leaf_count() const;
};

/// Greedy CART: splits minimize weighted Gini impurity over every
/// (feature, midpoint between consecutive distinct values) candidate; a node
/// stays a leaf unless some split strictly reduces impurity. Rows with
/// x[feature] < threshold go left.
TreeModel fit_tree(const StandardizedDesign& design, const TreeOptions& options = {});

int predict_tree(const TreeModel& model, const std::vector<double>& x);

/// Cost-complexity pruning: the weakest-link alpha sequence is built on
/// `tree`, the alpha is picked by stratified cross-validated error with the
/// one-standard-error rule, and the corresponding subtree is returned.
TreeModel prune_tree(const TreeModel& tree, const StandardizedDesign& design, int folds,
                     std::uint64_t seed, const TreeOptions& options = {});

struct ForestOptions {
    int tree_count = 100;
    int m = 0; // candidate features per split; 0 means round(sqrt(p))
    std::uint64_t seed = 1;
    TreeOptions tree;
    bool bootstrap = true; // diagnostic switch; off fits every tree on all rows
};

struct ForestModel {
    std::vector<TreeModel> trees;
    int m = 0;
    std::uint64_t seed = 0;
    /// Per tree, how often each training row was drawn. Kept in memory for
    /// out-of-bag scoring; not part of the serialized model.
    std::vector<std::vector<std::uint32_t>> inbag;
};

ForestModel fit_forest(const StandardizedDesign& design, const ForestOptions& options = {});

/// Majority vote across trees, ties to class 0.
int predict_forest(const ForestModel& model, const std::vector<double>& x);

/// Error rate over rows, each voted on only by trees that never drew it.
/// Requires the in-memory inbag bookkeeping from fit_forest.
double oob_error(const ForestModel& model, const StandardizedDesign& design);

} // namespace lungpipe
