#include "lungpipe/model.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "lungpipe/errors.hpp"

namespace lungpipe {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string>& model_kinds() {
    static const std::vector<std::string> kinds = {"logistic", "lda",    "qda", "knn",
                                                   "tree",     "forest", "svm", "kmeans"};
    return kinds;
}

namespace {

bool needs_standardization(const std::string& kind) { return kind != "tree" && kind != "forest"; }

Dataset subsample_dataset(const Dataset& data, std::size_t keep, std::uint64_t seed) {
    if (keep >= data.n())
        return data;
    if (keep == 0)
        throw argument_error("train_model: subsample of 0 rows");
    std::vector<std::size_t> order(data.n());
    for (std::size_t i = 0; i < data.n(); ++i)
        order[i] = i;
    Rng rng = Rng(seed).derive(99);
    rng.shuffle(order);
    order.resize(keep);
    std::sort(order.begin(), order.end());

    Dataset out;
    out.feature_names = data.feature_names;
    out.x = Matrix(keep, data.p());
    for (std::size_t r = 0; r < keep; ++r) {
        for (std::size_t c = 0; c < data.p(); ++c)
            out.x(r, c) = data.x(order[r], c);
        out.y.push_back(data.y[order[r]]);
        out.ids.push_back(data.ids[order[r]]);
    }
    return out;
}

} // namespace

TrainedModel train_model(const std::string& kind, const FeatureTable& table,
                         const std::vector<std::string>& predictors,
                         const TrainOptions& options) {
    Dataset data = make_dataset(table, predictors);
    if (options.subsample)
        data = subsample_dataset(data, *options.subsample, options.seed);

    TrainedModel model;
    model.kind = kind;
    model.predictors = predictors;

    StandardizedDesign design;
    if (needs_standardization(kind)) {
        design = standardize(data);
        model.scaler = design.scaler;
    } else {
        design = raw_design(data);
    }

    if (kind == "logistic") {
        model.params = fit_logistic(design);
    } else if (kind == "lda") {
        model.params = fit_lda(design);
    } else if (kind == "qda") {
        model.params = fit_qda(design);
    } else if (kind == "knn") {
        model.params = fit_knn(design, options.knn_k);
    } else if (kind == "tree") {
        TreeModel tree = fit_tree(design, options.tree);
        if (options.tree_prune)
            tree = prune_tree(tree, design, options.tree_cv_folds, options.seed, options.tree);
        model.params = std::move(tree);
    } else if (kind == "forest") {
        ForestOptions fo;
        fo.tree_count = options.forest_trees;
        fo.m = options.forest_m;
        fo.seed = options.seed;
        fo.tree = options.tree;
        model.params = fit_forest(design, fo);
    } else if (kind == "svm") {
        model.params = fit_svm(design, options.svm_kernel, options.svm_cost);
    } else if (kind == "kmeans") {
        model.params = fit_kmeans(design, options.kmeans_k, options.seed,
                                  options.kmeans_restarts);
    } else {
        throw argument_error("train_model: unknown model kind '" + kind + "'");
    }
    return model;
}

int model_predict(const TrainedModel& model, const std::vector<double>& raw_row) {
    const std::vector<double> row =
        model.scaler ? model.scaler->apply_row(raw_row) : raw_row;
    return std::visit(
        [&](const auto& params) -> int {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, LogisticModel>)
                return predict_logistic(params, row) > 0.5 ? 1 : 0;
            else if constexpr (std::is_same_v<T, LdaModel>)
                return predict_lda(params, row);
            else if constexpr (std::is_same_v<T, QdaModel>)
                return predict_qda(params, row);
            else if constexpr (std::is_same_v<T, KnnModel>)
                return predict_knn(params, row);
            else if constexpr (std::is_same_v<T, TreeModel>)
                return predict_tree(params, row);
            else if constexpr (std::is_same_v<T, ForestModel>)
                return predict_forest(params, row);
            else if constexpr (std::is_same_v<T, SvmModel>)
                return predict_svm(params, row);
            else
                return predict_kmeans(params, row);
        },
        model.params);
}

int model_predict_record(const TrainedModel& model, const FeatureRecord& rec) {
    return model_predict(model, record_row(rec, model.predictors));
}

namespace {

ordered_json matrix_to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols; ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const ordered_json& j) {
    if (!j.is_array())
        throw format_error("model json: expected a matrix");
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j.at(0).size() : 0;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (row.size() != cols)
            throw format_error("model json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c)
            m(i, c) = row.at(c).get<double>();
    }
    return m;
}

ordered_json tree_to_json(const TreeModel& tree) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : tree.nodes) {
        ordered_json n;
        n["feature"] = node.feature;
        n["threshold"] = node.threshold;
        n["left"] = node.left;
        n["right"] = node.right;
        n["class"] = node.klass;
        n["p0"] = node.p0;
        n["p1"] = node.p1;
        n["n0"] = node.n0;
        n["n1"] = node.n1;
        nodes.push_back(std::move(n));
    }
    return ordered_json{{"nodes", std::move(nodes)}};
}

TreeModel tree_from_json(const ordered_json& j) {
    TreeModel tree;
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.klass = n.at("class").get<int>();
        node.p0 = n.at("p0").get<double>();
        node.p1 = n.at("p1").get<double>();
        node.n0 = n.at("n0").get<std::size_t>();
        node.n1 = n.at("n1").get<std::size_t>();
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty())
        throw format_error("model json: tree has no nodes");
    return tree;
}

ordered_json params_to_json(const TrainedModel& model) {
    ordered_json p;
    std::visit(
        [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, LogisticModel>) {
                p["intercept"] = params.intercept;
                p["coefficients"] = params.coefficients;
                p["converged"] = params.converged;
                p["ridged"] = params.ridged;
                p["iterations"] = params.iterations;
            } else if constexpr (std::is_same_v<T, LdaModel>) {
                p["means"] = {params.means[0], params.means[1]};
                p["covariance"] = matrix_to_json(params.covariance);
                p["priors"] = {params.priors[0], params.priors[1]};
                p["ridged"] = params.ridged;
            } else if constexpr (std::is_same_v<T, QdaModel>) {
                p["means"] = {params.means[0], params.means[1]};
                p["covariances"] = {matrix_to_json(params.covariances[0]),
                                    matrix_to_json(params.covariances[1])};
                p["priors"] = {params.priors[0], params.priors[1]};
                p["ridged"] = params.ridged;
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                p["k"] = params.k;
                p["train_x"] = matrix_to_json(params.train_x);
                p["train_y"] = params.train_y;
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                p = tree_to_json(params);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                p["m"] = params.m;
                p["seed"] = params.seed;
                ordered_json trees = ordered_json::array();
                for (const auto& tree : params.trees)
                    trees.push_back(tree_to_json(tree));
                p["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                p["kernel"] = {{"kind", to_string(params.kernel.kind)},
                               {"degree", params.kernel.degree},
                               {"gamma", params.kernel.gamma}};
                p["cost"] = params.cost;
                p["support_vectors"] = matrix_to_json(params.support_vectors);
                p["alpha"] = params.alpha;
                p["labels"] = params.sv_labels;
                p["bias"] = params.bias;
                p["epochs"] = params.epochs;
            } else {
                p["k"] = params.centroids.rows;
                p["centroids"] = matrix_to_json(params.centroids);
                p["cluster_to_label"] = params.cluster_to_label;
                p["objective"] = params.objective;
                p["seed"] = params.seed;
                p["restarts"] = params.restarts;
            }
        },
        model.params);
    return p;
}

ModelParams params_from_json(const std::string& kind, const ordered_json& p) {
    if (kind == "logistic") {
        LogisticModel m;
        m.intercept = p.at("intercept").get<double>();
        m.coefficients = p.at("coefficients").get<std::vector<double>>();
        m.converged = p.at("converged").get<bool>();
        m.ridged = p.at("ridged").get<bool>();
        m.iterations = p.at("iterations").get<int>();
        return m;
    }
    if (kind == "lda") {
        LdaModel m;
        m.means[0] = p.at("means").at(0).get<std::vector<double>>();
        m.means[1] = p.at("means").at(1).get<std::vector<double>>();
        m.covariance = matrix_from_json(p.at("covariance"));
        m.priors[0] = p.at("priors").at(0).get<double>();
        m.priors[1] = p.at("priors").at(1).get<double>();
        m.ridged = p.at("ridged").get<bool>();
        return m;
    }
    if (kind == "qda") {
        QdaModel m;
        m.means[0] = p.at("means").at(0).get<std::vector<double>>();
        m.means[1] = p.at("means").at(1).get<std::vector<double>>();
        m.covariances[0] = matrix_from_json(p.at("covariances").at(0));
        m.covariances[1] = matrix_from_json(p.at("covariances").at(1));
        m.priors[0] = p.at("priors").at(0).get<double>();
        m.priors[1] = p.at("priors").at(1).get<double>();
        m.ridged = p.at("ridged").get<bool>();
        return m;
    }
    if (kind == "knn") {
        KnnModel m;
        m.k = p.at("k").get<int>();
        m.train_x = matrix_from_json(p.at("train_x"));
        m.train_y = p.at("train_y").get<std::vector<int>>();
        if (m.train_y.size() != m.train_x.rows)
            throw format_error("model json: knn labels do not match rows");
        return m;
    }
    if (kind == "tree")
        return tree_from_json(p);
    if (kind == "forest") {
        ForestModel m;
        m.m = p.at("m").get<int>();
        m.seed = p.at("seed").get<std::uint64_t>();
        for (const auto& tj : p.at("trees"))
            m.trees.push_back(tree_from_json(tj));
        if (m.trees.empty())
            throw format_error("model json: forest has no trees");
        return m;
    }
    if (kind == "svm") {
        SvmModel m;
        m.kernel.kind = kernel_kind_from_string(p.at("kernel").at("kind").get<std::string>());
        m.kernel.degree = p.at("kernel").at("degree").get<int>();
        m.kernel.gamma = p.at("kernel").at("gamma").get<double>();
        m.cost = p.at("cost").get<double>();
        m.support_vectors = matrix_from_json(p.at("support_vectors"));
        m.alpha = p.at("alpha").get<std::vector<double>>();
        m.sv_labels = p.at("labels").get<std::vector<int>>();
        m.bias = p.at("bias").get<double>();
        m.epochs = p.at("epochs").get<int>();
        if (m.alpha.size() != m.support_vectors.rows ||
            m.sv_labels.size() != m.support_vectors.rows)
            throw format_error("model json: svm coefficient lengths disagree");
        return m;
    }
    if (kind == "kmeans") {
        KMeansModel m;
        m.centroids = matrix_from_json(p.at("centroids"));
        m.cluster_to_label = p.at("cluster_to_label").get<std::vector<int>>();
        m.objective = p.at("objective").get<double>();
        m.seed = p.at("seed").get<std::uint64_t>();
        m.restarts = p.at("restarts").get<int>();
        if (m.cluster_to_label.size() != m.centroids.rows)
            throw format_error("model json: kmeans label map does not match centroids");
        return m;
    }
    throw format_error("model json: unknown kind '" + kind + "'");
}

} // namespace

void save_model_json(const TrainedModel& model, const std::string& path) {
    ordered_json doc;
    doc["version"] = 1;
    doc["kind"] = model.kind;
    doc["params"] = params_to_json(model);
    if (model.scaler) {
        doc["standardization"] = {{"features", model.scaler->feature_names},
                                  {"means", model.scaler->means},
                                  {"stddevs", model.scaler->stddevs}};
    } else {
        doc["standardization"] = nullptr;
    }
    doc["predictors"] = model.predictors;

    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

TrainedModel load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path + "'");
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("model json '" + path + "': " + e.what());
    }
    try {
        if (doc.at("version").get<int>() != 1)
            throw format_error("model json '" + path + "': unsupported version");
        TrainedModel model;
        model.kind = doc.at("kind").get<std::string>();
        model.params = params_from_json(model.kind, doc.at("params"));
        model.predictors = doc.at("predictors").get<std::vector<std::string>>();
        const auto& st = doc.at("standardization");
        if (!st.is_null()) {
            Standardizer scaler;
            scaler.feature_names = st.at("features").get<std::vector<std::string>>();
            scaler.means = st.at("means").get<std::vector<double>>();
            scaler.stddevs = st.at("stddevs").get<std::vector<double>>();
            if (scaler.means.size() != scaler.stddevs.size() ||
                scaler.means.size() != scaler.feature_names.size())
                throw format_error("model json '" + path + "': standardization lengths disagree");
            model.scaler = std::move(scaler);
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("model json '" + path + "': " + e.what());
    }
}

} // namespace lungpipe
