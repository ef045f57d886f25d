#pragma once

#include <cstdint>
#include <vector>

#include "lungpipe/image.hpp"

namespace lungpipe {

/// Per-pixel gradient magnitude (non-negative).
struct GradientImage {
    int width = 0;
    int height = 0;
    std::vector<double> magnitudes;

    GradientImage() = default;
    GradientImage(int w, int h) : width(w), height(h), magnitudes(static_cast<std::size_t>(w) * h, 0.0) {}

    double at(int row, int col) const { return magnitudes[static_cast<std::size_t>(row) * width + col]; }
    double& at(int row, int col) { return magnitudes[static_cast<std::size_t>(row) * width + col]; }
};

/// Flood seed classes: 0 = unknown, 1 = internal (lung tissue),
/// 2 = external (background); higher classes allowed.
struct MarkerMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;

    MarkerMap() = default;
    MarkerMap(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

    std::int32_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
    void set(int row, int col, std::int32_t v) { labels[static_cast<std::size_t>(row) * width + col] = v; }

    /// internal -> class 1, external -> class 2. The two masks must be
    /// disjoint and each non-empty.
    static MarkerMap from_masks(const BinaryMask& internal, const BinaryMask& external);
};

/// Watershed result. Basin ids are 1..region_count (0 = ridge line); each
/// basin grew from one 8-connected seed component and carries that seed's
/// marker class.
struct LabeledRegions {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> basin; // 0 = ridge
    int region_count = 0;
    std::vector<std::int32_t> basin_class; // indexed by basin id; [0] = 0

    std::int32_t basin_at(int row, int col) const { return basin[static_cast<std::size_t>(row) * width + col]; }
    std::int32_t class_at(int row, int col) const { return basin_class[basin_at(row, col)]; }
};

/// Gradient magnitude sqrt(Gx^2 + Gy^2) with the standard 3x3 Sobel kernels
/// and replicate border padding. Image must be at least 3x3.
GradientImage sobel_gradient(const GrayImage& img);

/// Threshold maximizing between-class variance; the dark class is {v <= T}.
/// Throws segmentation_error when the histogram is degenerate (single value).
int otsu_threshold(const GrayImage& img);

struct InternalMarkerOptions {
    double erosion = 2.0;                 // shrink so the marker sits strictly inside
    double second_component_ratio = 0.2;  // keep a second lung field this large relative to the first
};

/// Otsu-threshold, keep the dark side, drop border-touching components, keep
/// the largest one or two, fill holes, erode. Throws segmentation_error when
/// no interior component survives.
BinaryMask make_internal_marker(const GrayImage& img, const InternalMarkerOptions& opts = {});

/// Background marker: for a single-component internal marker, the boundary
/// of the marker dilated by `dilate_radius`; for multi-component markers,
/// the ridge lines of the watershed of the distance transform of the
/// marker's complement (the equidistant skeleton between components).
/// Always disjoint from the internal marker.
BinaryMask make_external_marker(const BinaryMask& internal, double dilate_radius = 10.0);

/// Priority-flood watershed: pixels are flooded in ascending gradient order
/// starting from the marker components; a pixel reached by floods of
/// distinct basins becomes ridge. Equal priorities resolve by insertion
/// order, which follows the row-major scan. Flood connectivity is 4.
LabeledRegions watershed(const GradientImage& grad, const MarkerMap& markers);

struct SegmentOptions {
    double dilate_radius = 10.0;
    InternalMarkerOptions internal;
};

/// Full marker-controlled pipeline: Sobel gradient, internal and external
/// markers, watershed; returns the union of basins grown from internal
/// markers.
BinaryMask segment_lungs(const GrayImage& img, const SegmentOptions& opts = {});

} // namespace lungpipe
