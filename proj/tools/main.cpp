#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lungpipe/dataset.hpp"
#include "lungpipe/errors.hpp"
#include "lungpipe/eval.hpp"
#include "lungpipe/features.hpp"
#include "lungpipe/imgio.hpp"
#include "lungpipe/model.hpp"
#include "lungpipe/phantom.hpp"
#include "lungpipe/prep.hpp"
#include "lungpipe/rng.hpp"
#include "lungpipe/segment.hpp"
#include "lungpipe/subset.hpp"

namespace fs = std::filesystem;
using namespace lungpipe;

namespace {

MedianWindow parse_median(const std::string& text) {
    int r = 0, c = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%dx%d%c", &r, &c, &extra) == 2)
        return {r, c};
    if (std::sscanf(text.c_str(), "%d%c", &r, &extra) == 1)
        return {r, r};
    throw argument_error("--median expects MxN (e.g. 3x3), got '" + text + "'");
}

std::string numbered(const char* stem, int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03d%s", stem, index, suffix);
    return buf;
}

void run_synth(const std::string& out_dir, int count, std::uint64_t seed, double train_fraction) {
    if (count < 1)
        throw argument_error("--count must be >= 1");
    if (!(train_fraction > 0 && train_fraction < 1))
        throw argument_error("--train-fraction must be in (0, 1)");
    fs::create_directories(out_dir);

    const auto specs = phantom_suite(count, seed);
    DatasetManifest manifest;
    for (int i = 0; i < count; ++i) {
        const Phantom ph = generate_phantom(specs[i]);
        const std::string name = numbered("phantom", i, ".pgm");
        save_image(ph.image, (fs::path(out_dir) / name).string());
        save_mask(ph.lung_mask, (fs::path(out_dir) / numbered("phantom", i, "_lungs.pgm")).string());
        save_mask(ph.nodule_mask,
                  (fs::path(out_dir) / numbered("phantom", i, "_nodules.pgm")).string());
        manifest.entries.push_back({name, specs[i].nodules.empty() ? 0 : 1, Split::train});
    }

    Rng rng(seed);
    for (int klass = 0; klass < 2; ++klass) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < manifest.entries.size(); ++i)
            if (manifest.entries[i].label == klass)
                rows.push_back(i);
        Rng stream = rng.derive(static_cast<std::uint64_t>(klass) + 1);
        stream.shuffle(rows);
        const auto keep = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(rows.size())));
        for (std::size_t i = keep; i < rows.size(); ++i)
            manifest.entries[rows[i]].split = Split::test;
    }
    save_manifest(manifest, (fs::path(out_dir) / "manifest.csv").string());

    std::size_t positives = 0;
    for (const auto& e : manifest.entries)
        positives += e.label;
    std::cout << "wrote " << count << " phantoms (" << positives << " with nodules) and manifest to "
              << out_dir << '\n';
}

void run_preprocess(const std::string& in, const std::string& out, const std::string& median,
                    int levels) {
    GrayImage img = load_image(in);
    img = median_filter(img, parse_median(median));
    img = equalize_histogram(img, levels);
    save_image(img, out);
    std::cout << "wrote " << out << '\n';
}

void run_segment(const std::string& in, const std::string& out_mask, const std::string& grad_path,
                 const std::string& markers_path, double dilate) {
    const GrayImage img = load_image(in);
    SegmentOptions opts;
    opts.dilate_radius = dilate;

    if (!grad_path.empty()) {
        const GradientImage grad = sobel_gradient(img);
        double peak = 0;
        for (double g : grad.magnitudes)
            peak = std::max(peak, g);
        GrayImage vis(grad.width, grad.height);
        for (std::size_t i = 0; i < grad.magnitudes.size(); ++i)
            vis.pixels[i] = peak > 0 ? static_cast<std::uint16_t>(
                                           std::lround(grad.magnitudes[i] / peak * 65535.0))
                                     : 0;
        save_image(vis, grad_path);
        std::cout << "wrote " << grad_path << '\n';
    }
    if (!markers_path.empty()) {
        const BinaryMask internal = make_internal_marker(img, opts.internal);
        const BinaryMask external = make_external_marker(internal, opts.dilate_radius);
        GrayImage vis(img.width, img.height);
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                vis.at(r, c) = internal.at(r, c) ? 32768 : external.at(r, c) ? 65535 : 0;
        save_image(vis, markers_path);
        std::cout << "wrote " << markers_path << '\n';
    }

    const BinaryMask mask = segment_lungs(img, opts);
    save_mask(mask, out_mask);
    std::cout << "wrote " << out_mask << '\n';
}

void run_features(const std::string& manifest_path, std::string base_dir, const std::string& out,
                  BatchOptions options, const std::string& median) {
    const MedianWindow win = parse_median(median);
    options.median_rows = win.rows;
    options.median_cols = win.cols;
    if (base_dir.empty())
        base_dir = fs::path(manifest_path).parent_path().string();
    const DatasetManifest manifest = load_manifest(manifest_path);
    const FeatureTable table = extract_features_batch(manifest, base_dir, options);
    save_feature_csv(table, out);
    std::cout << "wrote " << table.records.size() << " feature rows to " << out << '\n';
}

const std::vector<std::string>& resolve_predictors(const std::string& tag) {
    if (tag == "all")
        return all_predictors();
    if (tag == "three")
        return three_predictors();
    throw argument_error("--predictors expects 'all' or 'three', got '" + tag + "'");
}

struct TrainFlags {
    std::string features_csv, kind, out, predictors = "all", config, svm_kernel = "radial";
    TrainOptions opts;
    long long subsample = 0;
    bool no_prune = false;
};

void run_train(TrainFlags& f) {
    TrainOptions opts = f.opts;
    opts.svm_kernel.kind = kernel_kind_from_string(f.svm_kernel);
    opts.tree_prune = !f.no_prune;
    if (f.subsample > 0)
        opts.subsample = static_cast<std::size_t>(f.subsample);

    if (!f.config.empty()) {
        const PipelineConfig config = load_pipeline_config(f.config);
        opts = config.train;
        const auto it = config.models.find(f.kind);
        if (it != config.models.end()) {
            if (!it->second.enabled)
                throw argument_error("model '" + f.kind + "' is disabled in the config");
            opts.subsample = it->second.subsample;
        }
    }

    const FeatureTable table = load_feature_csv(f.features_csv);
    const TrainedModel model = train_model(f.kind, table, resolve_predictors(f.predictors), opts);
    save_model_json(model, f.out);
    std::cout << "trained " << f.kind << " on " << table.records.size() << " rows, wrote " << f.out
              << '\n';
}

void run_evaluate(const std::string& features_csv, const std::string& model_path,
                  const std::string& out) {
    const FeatureTable table = load_feature_csv(features_csv);
    const TrainedModel model = load_model_json(model_path);
    const auto [cm, acc] = evaluate(model, table);

    char line[128];
    std::snprintf(line, sizeof line, "%s: accuracy %.4f on %zu rows", model.kind.c_str(), acc,
                  cm.total());
    std::cout << line << '\n';
    std::snprintf(line, sizeof line, "tp %zu  fp %zu  tn %zu  fn %zu", cm.tp, cm.fp, cm.tn, cm.fn);
    std::cout << line << '\n';

    if (!out.empty()) {
        EvalReport report;
        report.generated_at = "";
        EvalRow row;
        row.model = model.kind;
        row.predictor_set = "custom";
        row.split = "input";
        row.accuracy = acc;
        row.matrix = cm;
        report.rows.push_back(row);
        report.train_rows = 0;
        report.test_rows = cm.total();
        save_report_json(report, out);
        std::cout << "wrote " << out << '\n';
    }
}

void run_report(const std::string& config_path, const std::string& out_dir, bool with_subsets) {
    const PipelineConfig config = load_pipeline_config(config_path);
    const EvalReport report = run_comparison(config);
    fs::create_directories(out_dir);

    const std::string report_path = (fs::path(out_dir) / "report.json").string();
    save_report_json(report, report_path);
    emit_chart(report, (fs::path(out_dir) / "chart.csv").string(),
               (fs::path(out_dir) / "chart.svg").string());

    if (with_subsets) {
        const FeatureTable table = load_feature_csv(config.features_csv);
        const auto [train_table, test_table] = split_dataset(table, config.split);
        const Dataset ds = make_dataset(train_table, all_predictors());
        const SubsetReport subsets = best_subsets(standardize(ds));
        save_subset_csv(subsets, (fs::path(out_dir) / "subsets.csv").string());
    }

    for (const auto& row : report.rows) {
        char line[256];
        if (row.status == "ok")
            std::snprintf(line, sizeof line, "%-9s %-6s %-6s accuracy %.4f", row.model.c_str(),
                          row.predictor_set.c_str(), row.split.c_str(), row.accuracy);
        else
            std::snprintf(line, sizeof line, "%-9s %-6s %-6s failed: %s", row.model.c_str(),
                          row.predictor_set.c_str(), row.split.c_str(), row.status.c_str());
        std::cout << line << '\n';
    }
    std::cout << "wrote " << report_path << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lung CT analysis pipeline: preprocessing, watershed segmentation, "
                 "ROI features, and an eight-model classification comparison"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate a synthetic phantom dataset");
    std::string synth_dir;
    int synth_count = 20;
    std::uint64_t synth_seed = 7;
    double synth_fraction = 0.8;
    synth->add_option("--out-dir", synth_dir, "output directory")->required();
    synth->add_option("--count", synth_count, "number of phantom images");
    synth->add_option("--seed", synth_seed, "master seed");
    synth->add_option("--train-fraction", synth_fraction, "train share of the manifest split");
    synth->callback([&] { run_synth(synth_dir, synth_count, synth_seed, synth_fraction); });

    auto* prep = app.add_subcommand("preprocess", "median filter and histogram equalization");
    std::string prep_in, prep_out, prep_median = "3x3";
    int prep_levels = 256;
    prep->add_option("--in", prep_in, "input PGM")->required();
    prep->add_option("--out", prep_out, "output PGM")->required();
    prep->add_option("--median", prep_median, "median window, MxN");
    prep->add_option("--levels", prep_levels, "equalization levels");
    prep->callback([&] { run_preprocess(prep_in, prep_out, prep_median, prep_levels); });

    auto* seg = app.add_subcommand("segment", "marker-controlled watershed lung segmentation");
    std::string seg_in, seg_out, seg_grad, seg_markers;
    double seg_dilate = 10.0;
    seg->add_option("--in", seg_in, "input PGM")->required();
    seg->add_option("--out-mask", seg_out, "output mask PGM (0/65535)")->required();
    seg->add_option("--emit-gradient", seg_grad, "also write the Sobel gradient as PGM");
    seg->add_option("--emit-markers", seg_markers, "also write the marker map as PGM");
    seg->add_option("--dilate", seg_dilate, "external marker dilation radius");
    seg->callback([&] { run_segment(seg_in, seg_out, seg_grad, seg_markers, seg_dilate); });

    auto* feat = app.add_subcommand("features", "run the image pipeline over a manifest");
    std::string feat_manifest, feat_base, feat_out, feat_median = "3x3";
    BatchOptions feat_opts;
    feat->add_option("--manifest", feat_manifest, "dataset manifest CSV")->required();
    feat->add_option("--base-dir", feat_base, "image directory (default: the manifest's)");
    feat->add_option("--out", feat_out, "output feature CSV")->required();
    feat->add_option("--median", feat_median, "median window, MxN");
    feat->add_option("--levels", feat_opts.equalize_levels, "equalization levels");
    feat->add_flag("--no-equalize", [&](std::int64_t) { feat_opts.equalize = false; },
                   "skip histogram equalization");
    feat->add_option("--bins", feat_opts.entropy_bins, "entropy histogram bins");
    feat->add_option("--dilate", feat_opts.segment.dilate_radius,
                     "external marker dilation radius");
    feat->add_option("--threads", feat_opts.threads, "worker threads (0 = auto)");
    feat->callback([&] { run_features(feat_manifest, feat_base, feat_out, feat_opts, feat_median); });

    auto* train = app.add_subcommand("train", "fit one model and save it as JSON");
    TrainFlags tf;
    train->add_option("--features", tf.features_csv, "labeled feature CSV")->required();
    train->add_option("--model", tf.kind,
                      "logistic|lda|qda|knn|tree|forest|svm|kmeans")->required();
    train->add_option("--out", tf.out, "output model JSON")->required();
    train->add_option("--predictors", tf.predictors, "'all' or 'three'");
    train->add_option("--config", tf.config, "pipeline config JSON; its train section "
                      "overrides the flags below");
    train->add_option("--seed", tf.opts.seed, "rng seed");
    train->add_option("--knn-k", tf.opts.knn_k, "neighbors for knn");
    train->add_option("--min-leaf", tf.opts.tree.min_leaf_size, "tree minimum leaf size");
    train->add_option("--max-depth", tf.opts.tree.max_depth, "tree depth cap");
    train->add_flag("--no-prune", tf.no_prune, "skip cost-complexity pruning");
    train->add_option("--cv-folds", tf.opts.tree_cv_folds, "pruning cross-validation folds");
    train->add_option("--trees", tf.opts.forest_trees, "forest size");
    train->add_option("--m", tf.opts.forest_m, "features per split (0 = round(sqrt(p)))");
    train->add_option("--svm-kernel", tf.svm_kernel, "inner_product|polynomial|radial");
    train->add_option("--svm-cost", tf.opts.svm_cost, "soft-margin cost C");
    train->add_option("--svm-gamma", tf.opts.svm_kernel.gamma, "radial kernel gamma");
    train->add_option("--svm-degree", tf.opts.svm_kernel.degree, "polynomial kernel degree");
    train->add_option("--kmeans-k", tf.opts.kmeans_k, "number of clusters");
    train->add_option("--restarts", tf.opts.kmeans_restarts, "k-means restarts");
    train->add_option("--subsample", tf.subsample, "train on this many seeded-sampled rows");
    train->callback([&] { run_train(tf); });

    auto* eval = app.add_subcommand("evaluate", "score a saved model against a labeled CSV");
    std::string eval_features, eval_model, eval_out;
    eval->add_option("--features", eval_features, "labeled feature CSV")->required();
    eval->add_option("--model", eval_model, "model JSON")->required();
    eval->add_option("--out", eval_out, "optional report JSON");
    eval->callback([&] { run_evaluate(eval_features, eval_model, eval_out); });

    auto* report = app.add_subcommand("report", "run the full model comparison");
    std::string report_config, report_dir;
    bool report_subsets = false;
    report->add_option("--config", report_config, "pipeline config JSON")->required();
    report->add_option("--out-dir", report_dir, "output directory")->required();
    report->add_flag("--subsets", report_subsets, "also emit the best-subset table");
    report->callback([&] { run_report(report_config, report_dir, report_subsets); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const argument_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const format_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
