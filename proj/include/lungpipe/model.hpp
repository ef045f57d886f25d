#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lungpipe/dataset.hpp"
#include "lungpipe/discriminant.hpp"
#include "lungpipe/kmeans.hpp"
#include "lungpipe/knn.hpp"
#include "lungpipe/logistic.hpp"
#include "lungpipe/svm.hpp"
#include "lungpipe/tree.hpp"

namespace lungpipe {

using ModelParams = std::variant<LogisticModel, LdaModel, QdaModel, KnnModel, TreeModel,
                                 ForestModel, SvmModel, KMeansModel>;

/// Any fitted classifier plus what it needs to score a raw feature row:
/// the predictor columns it was trained on and the standardization applied
/// to them (absent for the tree-based models, fitted on raw scale).
struct TrainedModel {
    std::string kind;
    ModelParams params;
    std::vector<std::string> predictors;
    std::optional<Standardizer> scaler;
};

/// The eight kinds, in report order.
const std::vector<std::string>& model_kinds();

struct TrainOptions {
    std::uint64_t seed = 17;
    int knn_k = 5;
    TreeOptions tree;
    bool tree_prune = true;
    int tree_cv_folds = 10;
    int forest_trees = 100;
    int forest_m = 0; // 0 means round(sqrt(p))
    KernelSpec svm_kernel;
    double svm_cost = 1.0;
    int kmeans_k = 2;
    int kmeans_restarts = 5;
    /// Seeded row subsample applied before fitting; anything >= n is a no-op.
    std::optional<std::size_t> subsample;
};

TrainedModel train_model(const std::string& kind, const FeatureTable& table,
                         const std::vector<std::string>& predictors,
                         const TrainOptions& options = {});

/// Class for a raw (unstandardized) predictor row in model.predictors order.
int model_predict(const TrainedModel& model, const std::vector<double>& raw_row);

int model_predict_record(const TrainedModel& model, const FeatureRecord& rec);

/// Versioned JSON: {"version":1,"kind":...,"params":{...},"standardization":...}.
void save_model_json(const TrainedModel& model, const std::string& path);

TrainedModel load_model_json(const std::string& path);

} // namespace lungpipe
