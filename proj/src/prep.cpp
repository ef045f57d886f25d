#include "lungpipe/prep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lungpipe/errors.hpp"

namespace lungpipe {

GrayImage median_filter(const GrayImage& img, MedianWindow window) {
    if (window.rows < 1 || window.cols < 1 || window.rows % 2 == 0 || window.cols % 2 == 0)
        throw argument_error("median_filter: window sides must be odd and >= 1");

    const int hr = window.rows / 2;
    const int hc = window.cols / 2;
    GrayImage out(img.width, img.height);
    std::vector<std::uint16_t> buf(static_cast<std::size_t>(window.rows) * window.cols);
    const std::size_t mid = buf.size() / 2;

    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            std::size_t k = 0;
            for (int dr = -hr; dr <= hr; ++dr)
                for (int dc = -hc; dc <= hc; ++dc)
                    buf[k++] = img.at_clamped(r + dr, c + dc);
            std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
            out.at(r, c) = buf[mid];
        }
    }
    return out;
}

GrayImage equalize_histogram(const GrayImage& img, int levels) {
    if (levels < 2)
        throw argument_error("equalize_histogram: levels must be >= 2");

    std::array<std::uint64_t, 65536> hist{};
    for (std::uint16_t v : img.pixels)
        ++hist[v];

    const double n = static_cast<double>(img.size());
    const double scale = 65535.0 / (levels - 1);
    std::vector<std::uint16_t> lut(65536, 0);
    std::uint64_t cum = 0;
    for (int v = 0; v < 65536; ++v) {
        cum += hist[v];
        if (hist[v] == 0)
            continue;
        const double cdf = static_cast<double>(cum) / n;
        const double level = std::round((levels - 1) * cdf);
        lut[v] = static_cast<std::uint16_t>(std::lround(level * scale));
    }

    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        out.pixels[i] = lut[img.pixels[i]];
    return out;
}

} // namespace lungpipe
