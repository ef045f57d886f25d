#pragma once

#include <string>
#include <vector>

#include "lungpipe/image.hpp"

namespace lungpipe {

/// Read a PGM file (ASCII "P2" or binary "P5", maxval <= 65535).
/// Pixel values are returned exactly as stored, never rescaled.
GrayImage load_image(const std::string& path);

/// Write binary PGM: header "P5\n<w> <h>\n65535\n", then big-endian u16 samples.
void save_image(const GrayImage& img, const std::string& path);

/// Convenience for masks: false -> 0, true -> 65535.
void save_mask(const BinaryMask& mask, const std::string& path);

/// Any nonzero pixel counts as true.
BinaryMask load_mask(const std::string& path);

enum class Split { train, test };

std::string to_string(Split s);

struct ManifestEntry {
    std::string path;
    int label = 0; // 1 = cancer, 0 = no cancer
    Split split = Split::train;
};

/// CSV-backed dataset index, header "path,label,split".
struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::size_t count(Split s) const;
};

/// Rejects duplicate paths, labels outside {0,1}, and unknown split tags.
DatasetManifest load_manifest(const std::string& path);

void save_manifest(const DatasetManifest& manifest, const std::string& path);

} // namespace lungpipe
