#include "lungpipe/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include "csv_util.hpp"
#include "json.hpp"
#include "lungpipe/errors.hpp"
#include "lungpipe/prep.hpp"

namespace lungpipe {

using ordered_json = nlohmann::ordered_json;

double ConfusionMatrix::accuracy() const {
    const std::size_t n = total();
    if (n == 0)
        throw argument_error("ConfusionMatrix: empty");
    return static_cast<double>(tp + tn) / static_cast<double>(n);
}

std::pair<ConfusionMatrix, double> evaluate(const TrainedModel& model,
                                            const FeatureTable& table) {
    if (table.records.empty())
        throw argument_error("evaluate: empty table");
    if (!table.has_labels())
        throw argument_error("evaluate: table carries no labels");

    ConfusionMatrix cm;
    for (const auto& rec : table.records) {
        const int pred = model_predict_record(model, rec);
        const int truth = *rec.label;
        if (pred == 1 && truth == 1)
            ++cm.tp;
        else if (pred == 1 && truth == 0)
            ++cm.fp;
        else if (pred == 0 && truth == 0)
            ++cm.tn;
        else
            ++cm.fn;
    }
    return {cm, cm.accuracy()};
}

std::pair<FeatureTable, FeatureTable> split_dataset(const FeatureTable& table,
                                                    const SplitSpec& spec) {
    table.validate();
    if (!table.has_labels())
        throw argument_error("split_dataset: table carries no labels");

    std::vector<char> in_train(table.records.size(), 0);
    if (spec.use_manifest) {
        for (std::size_t i = 0; i < table.records.size(); ++i) {
            const auto& id = table.records[i].id;
            bool found = false;
            for (const auto& e : spec.manifest.entries) {
                if (e.path == id) {
                    in_train[i] = e.split == Split::train;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw argument_error("split_dataset: row '" + id + "' not in the manifest");
        }
    } else {
        if (!(spec.train_fraction > 0 && spec.train_fraction < 1))
            throw argument_error("split_dataset: train_fraction must be in (0, 1)");
        Rng rng(spec.seed);
        for (int klass = 0; klass < 2; ++klass) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < table.records.size(); ++i)
                if (*table.records[i].label == klass)
                    rows.push_back(i);
            rng.shuffle(rows);
            const auto keep = static_cast<std::size_t>(
                std::llround(spec.train_fraction * static_cast<double>(rows.size())));
            for (std::size_t i = 0; i < keep && i < rows.size(); ++i)
                in_train[rows[i]] = 1;
        }
    }

    FeatureTable train, test;
    for (std::size_t i = 0; i < table.records.size(); ++i)
        (in_train[i] ? train : test).records.push_back(table.records[i]);
    return {std::move(train), std::move(test)};
}

namespace {

int resolve_threads(int requested, std::size_t jobs) {
    int t = requested;
    if (t <= 0) {
        if (const char* env = std::getenv("LUNGPIPE_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || v < 1)
                throw argument_error("LUNGPIPE_THREADS must be a positive integer");
            t = static_cast<int>(v);
        } else {
            t = static_cast<int>(std::thread::hardware_concurrency());
            if (t < 1)
                t = 1;
        }
    }
    if (static_cast<std::size_t>(t) > jobs)
        t = static_cast<int>(jobs);
    return t < 1 ? 1 : t;
}

} // namespace

FeatureTable extract_features_batch(const DatasetManifest& manifest, const std::string& base_dir,
                                    const BatchOptions& options) {
    const std::size_t n = manifest.entries.size();
    if (n == 0)
        throw argument_error("extract_features_batch: empty manifest");

    std::vector<FeatureRecord> records(n);
    std::vector<std::exception_ptr> failures(n);

    auto process = [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        std::filesystem::path path(entry.path);
        if (path.is_relative() && !base_dir.empty())
            path = std::filesystem::path(base_dir) / path;
        GrayImage img = load_image(path.string());
        img = median_filter(img, {options.median_rows, options.median_cols});
        // markers come from the smoothed image; equalization would flatten the
        // histogram valley the internal-marker threshold needs
        const BinaryMask mask = segment_lungs(img, options.segment);
        if (options.equalize)
            img = equalize_histogram(img, options.equalize_levels);
        FeatureRecord rec = extract_features(img, mask, entry.path, options.entropy_bins);
        rec.label = entry.label;
        records[i] = std::move(rec);
    };

    const int threads = resolve_threads(options.threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            process(i); // first failure propagates directly
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                for (std::size_t i = static_cast<std::size_t>(t); i < n;
                     i += static_cast<std::size_t>(threads)) {
                    try {
                        process(i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (std::size_t i = 0; i < n; ++i)
            if (failures[i])
                std::rethrow_exception(failures[i]);
    }

    FeatureTable table;
    table.records = std::move(records);
    table.validate();
    return table;
}

namespace {

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void require_exists(const std::string& path, const char* what) {
    if (!std::filesystem::exists(path))
        throw argument_error(std::string("config: ") + what + " '" + path + "' does not exist");
}

ModelConfig model_config_for(const PipelineConfig& config, const std::string& kind) {
    const auto it = config.models.find(kind);
    return it == config.models.end() ? ModelConfig{} : it->second;
}

std::string hyper_string(const std::string& kind, const TrainOptions& opts,
                         const TrainedModel& model) {
    if (kind == "knn")
        return "k=" + std::to_string(opts.knn_k);
    if (kind == "tree") {
        std::string s = "min_leaf=" + std::to_string(opts.tree.min_leaf_size) +
                        " max_depth=" + std::to_string(opts.tree.max_depth);
        if (opts.tree_prune)
            s += " pruned cv_folds=" + std::to_string(opts.tree_cv_folds);
        return s;
    }
    if (kind == "forest") {
        const auto& forest = std::get<ForestModel>(model.params);
        return "trees=" + std::to_string(forest.trees.size()) + " m=" + std::to_string(forest.m);
    }
    if (kind == "svm") {
        const auto& svm = std::get<SvmModel>(model.params);
        std::string s = "kernel=" + to_string(svm.kernel.kind) +
                        " C=" + detail::format_double(svm.cost);
        if (svm.kernel.kind == KernelKind::radial)
            s += " gamma=" + detail::format_double(svm.kernel.gamma);
        if (svm.kernel.kind == KernelKind::polynomial)
            s += " degree=" + std::to_string(svm.kernel.degree);
        return s;
    }
    if (kind == "kmeans")
        return "K=" + std::to_string(opts.kmeans_k) +
               " restarts=" + std::to_string(opts.kmeans_restarts);
    if (kind == "logistic") {
        const auto& lm = std::get<LogisticModel>(model.params);
        return std::string("irls converged=") + (lm.converged ? "1" : "0");
    }
    return "";
}

} // namespace

std::string config_canonical_json(const PipelineConfig& config) {
    ordered_json doc;
    doc["features_csv"] = config.features_csv;
    ordered_json split;
    split["mode"] = config.split.use_manifest ? "manifest" : "stratified";
    if (config.split.use_manifest)
        split["manifest"] = config.split.manifest_path;
    split["train_fraction"] = config.split.train_fraction;
    split["seed"] = config.split.seed;
    doc["split"] = std::move(split);
    doc["seed"] = config.train.seed;
    doc["predictor_sets"] = config.predictor_sets;
    doc["eval_splits"] = config.eval_splits;
    doc["batch"] = {{"median_rows", config.batch.median_rows},
                    {"median_cols", config.batch.median_cols},
                    {"equalize", config.batch.equalize},
                    {"equalize_levels", config.batch.equalize_levels},
                    {"dilate_radius", config.batch.segment.dilate_radius},
                    {"erosion_radius", config.batch.segment.internal.erosion},
                    {"second_ratio", config.batch.segment.internal.second_component_ratio},
                    {"entropy_bins", config.batch.entropy_bins}};
    doc["train"] = {{"knn_k", config.train.knn_k},
                    {"tree_min_leaf", config.train.tree.min_leaf_size},
                    {"tree_max_depth", config.train.tree.max_depth},
                    {"tree_prune", config.train.tree_prune},
                    {"tree_cv_folds", config.train.tree_cv_folds},
                    {"forest_trees", config.train.forest_trees},
                    {"forest_m", config.train.forest_m},
                    {"svm_kernel", to_string(config.train.svm_kernel.kind)},
                    {"svm_degree", config.train.svm_kernel.degree},
                    {"svm_gamma", config.train.svm_kernel.gamma},
                    {"svm_cost", config.train.svm_cost},
                    {"kmeans_k", config.train.kmeans_k},
                    {"kmeans_restarts", config.train.kmeans_restarts}};
    ordered_json models;
    for (const auto& kind : model_kinds()) {
        const ModelConfig mc = model_config_for(config, kind);
        ordered_json m;
        m["enabled"] = mc.enabled;
        if (mc.subsample)
            m["subsample"] = *mc.subsample;
        models[kind] = std::move(m);
    }
    doc["models"] = std::move(models);
    return doc.dump();
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config '" + path + "'");
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("config '" + path + "': " + e.what());
    }
    if (!doc.is_object())
        throw format_error("config '" + path + "': expected a JSON object");

    PipelineConfig config;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "features_csv") {
                config.features_csv = value.get<std::string>();
                require_exists(config.features_csv, "features_csv");
            } else if (key == "seed") {
                config.train.seed = value.get<std::uint64_t>();
            } else if (key == "split") {
                for (const auto& [k2, v2] : value.items()) {
                    if (k2 == "mode") {
                        const auto mode = v2.get<std::string>();
                        if (mode == "manifest")
                            config.split.use_manifest = true;
                        else if (mode != "stratified")
                            throw argument_error("config: unknown split mode '" + mode + "'");
                    } else if (k2 == "manifest") {
                        config.split.manifest_path = v2.get<std::string>();
                    } else if (k2 == "train_fraction") {
                        config.split.train_fraction = v2.get<double>();
                    } else if (k2 == "seed") {
                        config.split.seed = v2.get<std::uint64_t>();
                    } else {
                        throw argument_error("config: unknown split key '" + k2 + "'");
                    }
                }
                if (config.split.use_manifest) {
                    if (config.split.manifest_path.empty())
                        throw argument_error("config: manifest split mode needs a manifest path");
                    require_exists(config.split.manifest_path, "manifest");
                    config.split.manifest = load_manifest(config.split.manifest_path);
                }
            } else if (key == "predictor_sets") {
                config.predictor_sets = value.get<std::vector<std::string>>();
                if (config.predictor_sets.empty())
                    throw argument_error("config: predictor_sets must not be empty");
                for (const auto& tag : config.predictor_sets)
                    if (tag != "all" && tag != "three")
                        throw argument_error("config: unknown predictor set '" + tag + "'");
            } else if (key == "eval_splits") {
                config.eval_splits = value.get<std::vector<std::string>>();
                if (config.eval_splits.empty())
                    throw argument_error("config: eval_splits must not be empty");
                for (const auto& tag : config.eval_splits)
                    if (tag != "train" && tag != "test")
                        throw argument_error("config: unknown eval split '" + tag + "'");
            } else if (key == "batch") {
                for (const auto& [k2, v2] : value.items()) {
                    if (k2 == "median_rows")
                        config.batch.median_rows = v2.get<int>();
                    else if (k2 == "median_cols")
                        config.batch.median_cols = v2.get<int>();
                    else if (k2 == "equalize")
                        config.batch.equalize = v2.get<bool>();
                    else if (k2 == "equalize_levels")
                        config.batch.equalize_levels = v2.get<int>();
                    else if (k2 == "dilate_radius")
                        config.batch.segment.dilate_radius = v2.get<double>();
                    else if (k2 == "erosion_radius")
                        config.batch.segment.internal.erosion = v2.get<double>();
                    else if (k2 == "second_ratio")
                        config.batch.segment.internal.second_component_ratio = v2.get<double>();
                    else if (k2 == "entropy_bins")
                        config.batch.entropy_bins = v2.get<int>();
                    else if (k2 == "threads")
                        config.batch.threads = v2.get<int>();
                    else
                        throw argument_error("config: unknown batch key '" + k2 + "'");
                }
            } else if (key == "models") {
                for (const auto& kind : model_kinds())
                    config.models[kind].enabled = false;
                for (const auto& [kind, mv] : value.items()) {
                    bool known = false;
                    for (const auto& k : model_kinds())
                        known = known || k == kind;
                    if (!known)
                        throw argument_error("config: unknown model kind '" + kind + "'");
                    ModelConfig mc;
                    mc.enabled = true;
                    for (const auto& [k2, v2] : mv.items()) {
                        if (k2 == "enabled")
                            mc.enabled = v2.get<bool>();
                        else if (k2 == "subsample")
                            mc.subsample = v2.get<std::size_t>();
                        else if (kind == "knn" && k2 == "k")
                            config.train.knn_k = v2.get<int>();
                        else if ((kind == "tree" || kind == "forest") && k2 == "min_leaf_size")
                            config.train.tree.min_leaf_size = v2.get<int>();
                        else if ((kind == "tree" || kind == "forest") && k2 == "max_depth")
                            config.train.tree.max_depth = v2.get<int>();
                        else if (kind == "tree" && k2 == "prune")
                            config.train.tree_prune = v2.get<bool>();
                        else if (kind == "tree" && k2 == "cv_folds")
                            config.train.tree_cv_folds = v2.get<int>();
                        else if (kind == "forest" && k2 == "trees")
                            config.train.forest_trees = v2.get<int>();
                        else if (kind == "forest" && k2 == "m")
                            config.train.forest_m = v2.get<int>();
                        else if (kind == "svm" && k2 == "kernel")
                            config.train.svm_kernel.kind =
                                kernel_kind_from_string(v2.get<std::string>());
                        else if (kind == "svm" && k2 == "degree")
                            config.train.svm_kernel.degree = v2.get<int>();
                        else if (kind == "svm" && k2 == "gamma")
                            config.train.svm_kernel.gamma = v2.get<double>();
                        else if (kind == "svm" && k2 == "cost")
                            config.train.svm_cost = v2.get<double>();
                        else if (kind == "kmeans" && k2 == "k")
                            config.train.kmeans_k = v2.get<int>();
                        else if (kind == "kmeans" && k2 == "restarts")
                            config.train.kmeans_restarts = v2.get<int>();
                        else
                            throw argument_error("config: unknown key '" + k2 + "' for model '" +
                                                 kind + "'");
                    }
                    config.models[kind] = mc;
                }
            } else {
                throw argument_error("config: unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error("config '" + path + "': " + e.what());
    }
    return config;
}

EvalReport run_comparison(const PipelineConfig& config) {
    if (config.features_csv.empty())
        throw argument_error("run_comparison: config has no features_csv");
    const FeatureTable table = load_feature_csv(config.features_csv);
    auto [train_table, test_table] = split_dataset(table, config.split);

    EvalReport report;
    report.generated_at = iso_utc_now();
    report.config_hash = hex64(fnv1a(config_canonical_json(config)));
    report.train_rows = train_table.records.size();
    report.test_rows = test_table.records.size();

    for (const auto& kind : model_kinds()) {
        const ModelConfig mc = model_config_for(config, kind);
        if (!mc.enabled)
            continue;
        for (const auto& set_tag : config.predictor_sets) {
            const auto& predictors =
                set_tag == "all" ? all_predictors() : three_predictors();
            TrainOptions opts = config.train;
            opts.subsample = mc.subsample;

            TrainedModel model;
            std::string fit_error;
            try {
                model = train_model(kind, train_table, predictors, opts);
            } catch (const std::exception& e) {
                fit_error = e.what();
            }

            for (const auto& split_tag : config.eval_splits) {
                EvalRow row;
                row.model = kind;
                row.predictor_set = set_tag;
                row.split = split_tag;
                if (!fit_error.empty()) {
                    row.status = fit_error;
                } else {
                    row.hyperparameters = hyper_string(kind, opts, model);
                    try {
                        const auto& tbl = split_tag == "train" ? train_table : test_table;
                        const auto [cm, acc] = evaluate(model, tbl);
                        row.matrix = cm;
                        row.accuracy = acc;
                    } catch (const std::exception& e) {
                        row.status = e.what();
                    }
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

void save_report_json(const EvalReport& report, const std::string& path) {
    ordered_json doc;
    doc["version"] = 1;
    doc["generated_at"] = report.generated_at;
    doc["config_hash"] = report.config_hash;
    doc["train_rows"] = report.train_rows;
    doc["test_rows"] = report.test_rows;
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json r;
        r["model"] = row.model;
        r["predictor_set"] = row.predictor_set;
        r["split"] = row.split;
        r["status"] = row.status;
        r["accuracy"] = row.accuracy;
        r["confusion"] = {{"tp", row.matrix.tp},
                          {"fp", row.matrix.fp},
                          {"tn", row.matrix.tn},
                          {"fn", row.matrix.fn}};
        r["hyperparameters"] = row.hyperparameters;
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);

    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

void emit_chart(const EvalReport& report, const std::string& csv_path,
                const std::string& svg_path) {
    if (report.rows.empty())
        throw argument_error("emit_chart: empty report");

    {
        std::ofstream out(csv_path);
        if (!out)
            throw io_error("cannot open '" + csv_path + "' for writing");
        out << "model,predictor_set,split,accuracy\n";
        for (const auto& row : report.rows)
            out << row.model << ',' << row.predictor_set << ',' << row.split << ','
                << detail::format_double(row.accuracy) << '\n';
        if (!out)
            throw io_error("write failed for '" + csv_path + "'");
    }

    // grouped bars: one group per model, one bar per report row
    static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                     "#76b7b2", "#edc949", "#af7aa1", "#9c755f"};
    std::vector<std::string> series; // distinct "set/split" tags, first-seen order
    for (const auto& row : report.rows) {
        const std::string tag = row.predictor_set + "/" + row.split;
        bool seen = false;
        for (const auto& s : series)
            seen = seen || s == tag;
        if (!seen)
            series.push_back(tag);
    }

    std::vector<std::pair<std::string, std::vector<const EvalRow*>>> groups;
    for (const auto& row : report.rows) {
        if (groups.empty() || groups.back().first != row.model)
            groups.push_back({row.model, {}});
        groups.back().second.push_back(&row);
    }

    const int plot_h = 200, bar_w = 22, bar_gap = 4, group_gap = 26;
    const int margin_l = 48, margin_t = 24, margin_b = 56;
    int width = margin_l + group_gap;
    for (const auto& g : groups)
        width += static_cast<int>(g.second.size()) * (bar_w + bar_gap) + group_gap;
    width = std::max(width, 320);
    const int legend_h = 18 * static_cast<int>(series.size());
    const int height = margin_t + plot_h + margin_b + legend_h;

    std::ofstream out(svg_path);
    if (!out)
        throw io_error("cannot open '" + svg_path + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    // axis with ticks at 0, 0.5, 1
    const int axis_x = margin_l - 6;
    out << "  <line x1=\"" << axis_x << "\" y1=\"" << margin_t << "\" x2=\"" << axis_x
        << "\" y2=\"" << margin_t + plot_h << "\" stroke=\"#333\"/>\n";
    for (int tick = 0; tick <= 2; ++tick) {
        const int y = margin_t + plot_h - tick * plot_h / 2;
        out << "  <line x1=\"" << axis_x - 4 << "\" y1=\"" << y << "\" x2=\"" << axis_x
            << "\" y2=\"" << y << "\" stroke=\"#333\"/>\n";
        out << "  <text x=\"" << axis_x - 8 << "\" y=\"" << y + 4
            << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">" << (tick * 50) / 100.0
            << "</text>\n";
    }

    int x = margin_l + group_gap;
    for (const auto& [model, rows] : groups) {
        const int group_w = static_cast<int>(rows.size()) * (bar_w + bar_gap);
        for (const auto* row : rows) {
            const std::string tag = row->predictor_set + "/" + row->split;
            std::size_t series_idx = 0;
            for (std::size_t s = 0; s < series.size(); ++s)
                if (series[s] == tag)
                    series_idx = s;
            const int h = static_cast<int>(std::lround(row->accuracy * plot_h));
            out << "  <rect x=\"" << x << "\" y=\"" << margin_t + plot_h - h << "\" width=\""
                << bar_w << "\" height=\"" << h << "\" fill=\"" << kPalette[series_idx % 8]
                << "\" data-model=\"" << row->model << "\" data-set=\"" << row->predictor_set
                << "\" data-split=\"" << row->split << "\" data-accuracy=\""
                << detail::format_double(row->accuracy) << "\"/>\n";
            x += bar_w + bar_gap;
        }
        out << "  <text x=\"" << x - group_w / 2 - bar_gap << "\" y=\""
            << margin_t + plot_h + 16 << "\" font-size=\"12\" text-anchor=\"middle\" "
            << "fill=\"#333\">" << model << "</text>\n";
        x += group_gap;
    }

    out << "  <line x1=\"" << axis_x << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
        << width - 8 << "\" y2=\"" << margin_t + plot_h << "\" stroke=\"#333\"/>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const int y = margin_t + plot_h + 36 + 18 * static_cast<int>(s);
        out << "  <rect x=\"" << margin_l << "\" y=\"" << y - 10
            << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[s % 8] << "\"/>\n";
        out << "  <text x=\"" << margin_l + 18 << "\" y=\"" << y
            << "\" font-size=\"12\" fill=\"#333\">" << series[s] << "</text>\n";
    }
    out << "</svg>\n";
    if (!out)
        throw io_error("write failed for '" + svg_path + "'");
}

} // namespace lungpipe
