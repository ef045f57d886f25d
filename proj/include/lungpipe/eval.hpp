#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lungpipe/imgio.hpp"
#include "lungpipe/model.hpp"
#include "lungpipe/segment.hpp"

namespace lungpipe {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    double accuracy() const;
};

/// Threshold-0.5 predictions against the table's labels.
std::pair<ConfusionMatrix, double> evaluate(const TrainedModel& model, const FeatureTable& table);

/// How to carve a labeled feature table into train and test.
struct SplitSpec {
    bool use_manifest = false;
    DatasetManifest manifest;    // consulted when use_manifest, matched by row id
    std::string manifest_path;   // provenance only; recorded in the config hash
    double train_fraction = 0.8; // stratified mode
    std::uint64_t seed = 1;
};

/// Disjoint, exhaustive partition. Manifest mode assigns each row the split
/// recorded for its id; stratified mode draws a seeded per-class sample of
/// round(fraction * class size) training rows.
std::pair<FeatureTable, FeatureTable> split_dataset(const FeatureTable& table,
                                                    const SplitSpec& spec);

/// Preprocessing, segmentation and feature knobs for batch extraction.
struct BatchOptions {
    int median_rows = 3, median_cols = 3;
    int equalize_levels = 256;
    bool equalize = true;
    SegmentOptions segment;
    int entropy_bins = 256;
    int threads = 0; // 0: LUNGPIPE_THREADS, falling back to the hardware count
};

/// Runs the image pipeline over every manifest entry (relative paths resolve
/// against base_dir) and returns one labeled feature row per image, in
/// manifest order. Work is spread over threads; output is order-stable.
FeatureTable extract_features_batch(const DatasetManifest& manifest, const std::string& base_dir,
                                    const BatchOptions& options = {});

struct ModelConfig {
    bool enabled = true;
    std::optional<std::size_t> subsample;
};

struct PipelineConfig {
    std::string features_csv; // input table for the comparison
    SplitSpec split;
    TrainOptions train;
    BatchOptions batch;
    std::vector<std::string> predictor_sets = {"all", "three"};
    std::vector<std::string> eval_splits = {"train", "test"};
    std::map<std::string, ModelConfig> models; // absent kind = enabled, no subsample
};

/// Parses the config JSON; every input path it references must exist.
PipelineConfig load_pipeline_config(const std::string& path);

struct EvalRow {
    std::string model;
    std::string predictor_set;
    std::string split;
    std::string status = "ok"; // or the fit error
    double accuracy = 0;
    ConfusionMatrix matrix;
    std::string hyperparameters;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::string generated_at; // ISO 8601 UTC; the only run-dependent field
    std::string config_hash;  // FNV-1a of the canonical config serialization
    std::size_t train_rows = 0, test_rows = 0;
};

/// Fits every enabled model under each predictor set and scores the requested
/// splits. A model fit failure is recorded in its rows' status and the
/// comparison continues.
EvalReport run_comparison(const PipelineConfig& config);

void save_report_json(const EvalReport& report, const std::string& path);

/// One CSV data row and one SVG bar per report row; bar heights are
/// proportional to accuracy within a pixel.
void emit_chart(const EvalReport& report, const std::string& csv_path,
                const std::string& svg_path);

/// Canonical serialization of the config (also what the report hash covers).
std::string config_canonical_json(const PipelineConfig& config);

} // namespace lungpipe
