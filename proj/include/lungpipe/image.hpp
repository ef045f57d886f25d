#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lungpipe/errors.hpp"

namespace lungpipe {

/// 2-D grayscale raster, row-major, 16-bit storage range [0, 65535].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> pixels;

    GrayImage() = default;

    GrayImage(int w, int h, std::uint16_t fill = 0) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw argument_error("GrayImage: width and height must be >= 1");
        pixels.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::size_t size() const { return pixels.size(); }

    std::uint16_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
    std::uint16_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }

    /// Replicate-padded access: out-of-range indices clamp to the edge.
    std::uint16_t at_clamped(int row, int col) const {
        row = std::clamp(row, 0, height - 1);
        col = std::clamp(col, 0, width - 1);
        return at(row, col);
    }

    bool in_bounds(int row, int col) const { return row >= 0 && row < height && col >= 0 && col < width; }

    bool operator==(const GrayImage& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

/// Boolean raster with the same addressing conventions as GrayImage.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryMask() = default;

    BinaryMask(int w, int h, bool fill = false) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw argument_error("BinaryMask: width and height must be >= 1");
        pixels.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
    }

    std::size_t size() const { return pixels.size(); }

    bool at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col] != 0; }
    void set(int row, int col, bool v) { pixels[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0; }

    bool in_bounds(int row, int col) const { return row >= 0 && row < height && col >= 0 && col < width; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto p : pixels)
            n += (p != 0);
        return n;
    }

    bool any() const {
        for (auto p : pixels)
            if (p)
                return true;
        return false;
    }

    bool operator==(const BinaryMask& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

/// 2|A∩B| / (|A|+|B|); 1.0 when both masks are empty.
double dice_coefficient(const BinaryMask& a, const BinaryMask& b);

} // namespace lungpipe
