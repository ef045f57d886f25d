#pragma once

#include <cstdint>
#include <vector>

#include "lungpipe/image.hpp"

namespace lungpipe {

/// Connected-component labeling result: 0 = background, 1..count = components,
/// ids assigned in row-major first-pixel order.
struct ComponentLabels {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;
    int count = 0;

    std::int32_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
};

/// connectivity must be 4 or 8.
ComponentLabels label_mask(const BinaryMask& mask, int connectivity);

std::vector<std::size_t> component_areas(const ComponentLabels& labels);

/// Fill enclosed background cavities: background is flood-filled (4-connected)
/// from the image border; unreached background pixels become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

/// Drop every component (8-connected) that touches the image border.
BinaryMask remove_border_components(const BinaryMask& mask);

/// Exact squared Euclidean distance from every pixel to the nearest true
/// pixel of `seeds` (two-pass lower-envelope transform). Pixels unreachable
/// because `seeds` is empty get a large sentinel (> any in-image distance).
std::vector<double> squared_distance_transform(const BinaryMask& seeds);

/// Pixels within Euclidean distance `radius` of the set.
BinaryMask dilate(const BinaryMask& mask, double radius);

/// Pixels whose distance to the complement exceeds `radius`.
BinaryMask erode(const BinaryMask& mask, double radius);

/// Set pixels with an in-image 4-neighbor outside the set.
BinaryMask boundary(const BinaryMask& mask);

} // namespace lungpipe
