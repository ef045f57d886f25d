#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lungpipe/image.hpp"

namespace lungpipe {

/// One 8-connected component of a mask: pixel coordinates, and the source
/// intensities under those pixels when an image was supplied.
struct Region {
    std::vector<std::pair<int, int>> pixels; // (row, col)
    std::vector<std::uint16_t> intensities;
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;

    std::size_t area() const { return pixels.size(); }
};

/// Maximal 8-connected components of the true pixels, ordered by
/// (min row, min col) of each component.
std::vector<Region> label_components(const BinaryMask& mask);

/// Same, with intensities collected from `source`.
std::vector<Region> label_components(const BinaryMask& mask, const GrayImage& source);

/// Pixel count.
std::size_t area(const Region& r);

/// Number of unit edges separating a region pixel from a non-region pixel
/// (pixels outside the image count as non-region); covers outer and hole
/// boundaries.
std::size_t perimeter(const Region& r);

struct IntensityStats {
    double stddev = 0;                 // population standard deviation
    std::optional<double> skewness;    // m3 / sigma^3; absent when variance is 0
    std::optional<double> kurtosis;    // m4 / sigma^4, normal = 3; absent when variance is 0
};

/// Central-moment statistics of the region's intensities. Requires collected
/// intensities. Zero variance leaves skewness/kurtosis unset.
IntensityStats intensity_stats(const Region& r);

/// Shannon entropy in bits of the region's intensity histogram with
/// `bins` equal-width bins over the 16-bit storage range.
double entropy(const Region& r, int bins = 256);

/// Eccentricity of the second-moment ellipse of the pixel coordinates,
/// in [0, 1]. Not part of the default feature set.
double eccentricity(const Region& r);

/// The six-feature row for one image. Skewness/kurtosis are absent for
/// degenerate (constant-intensity) regions.
struct FeatureRecord {
    std::string id;
    double area = 0;
    double perimeter = 0;
    double stddev = 0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
    double entropy = 0;
    std::optional<int> label;
};

/// Features of the largest mask component (ties by component order),
/// computed over the given image's intensities.
FeatureRecord extract_features(const GrayImage& img, const BinaryMask& mask, const std::string& id,
                               int entropy_bins = 256);

struct FeatureTable {
    std::vector<FeatureRecord> records;

    bool has_labels() const;
    /// Enforces the all-or-none label invariant.
    void validate() const;
};

/// Column order: id,area,perimeter,stddev,skewness,kurtosis,entropy[,label].
/// Floats carry 17 significant digits; absent skewness/kurtosis serialize
/// as "nan".
void save_feature_csv(const FeatureTable& table, const std::string& path);

FeatureTable load_feature_csv(const std::string& path);

} // namespace lungpipe
