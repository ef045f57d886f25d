#pragma once

#include "lungpipe/image.hpp"

namespace lungpipe {

/// Odd-sized smoothing neighborhood, rows x cols.
struct MedianWindow {
    int rows = 3;
    int cols = 3;
};

/// Each output pixel is the median of the rows x cols neighborhood around
/// the corresponding input pixel; borders use replicate padding. Output
/// dimensions equal input dimensions. Window sides must be odd.
GrayImage median_filter(const GrayImage& img, MedianWindow window = {});

/// Global histogram equalization. The transfer function maps value v to
/// round((levels-1) * CDF(v)), then scales the level index back to the
/// 16-bit storage range. Monotone in the input value. levels >= 2.
GrayImage equalize_histogram(const GrayImage& img, int levels = 256);

} // namespace lungpipe
