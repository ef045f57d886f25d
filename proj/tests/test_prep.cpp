#include "doctest.h"

#include <algorithm>
#include <set>
#include <vector>

#include "lungpipe/prep.hpp"
#include "lungpipe/rng.hpp"

using namespace lungpipe;

namespace {

// Brute force: sort every clamped window and take the middle element.
GrayImage median_oracle(const GrayImage& img, int wr, int wc) {
    GrayImage out(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            std::vector<std::uint16_t> window;
            for (int dr = -wr / 2; dr <= wr / 2; ++dr)
                for (int dc = -wc / 2; dc <= wc / 2; ++dc)
                    window.push_back(img.at_clamped(r + dr, c + dc));
            std::sort(window.begin(), window.end());
            out.at(r, c) = window[window.size() / 2];
        }
    }
    return out;
}

GrayImage random_image(Rng& rng, int w, int h, int value_range) {
    GrayImage img(w, h);
    for (auto& px : img.pixels)
        px = static_cast<std::uint16_t>(rng.uniform_int(value_range));
    return img;
}

} // namespace

TEST_CASE("median of a constant image is the same image") {
    const GrayImage img(9, 7, 1234);
    CHECK(median_filter(img, {3, 3}) == img);
    CHECK(median_filter(img, {5, 1}) == img);
}

TEST_CASE("median removes a single impulse") {
    GrayImage img(3, 3, 0);
    img.at(1, 1) = 255;
    const GrayImage out = median_filter(img, {3, 3});
    CHECK(out.at(1, 1) == 0);
}

TEST_CASE("median matches the brute-force oracle on random 7x7 images") {
    Rng rng(2024);
    const int windows[][2] = {{1, 1}, {3, 3}, {3, 5}, {5, 3}, {5, 5}};
    for (int trial = 0; trial < 30; ++trial) {
        const GrayImage img = random_image(rng, 7, 7, 65536);
        for (const auto& w : windows)
            CHECK(median_filter(img, {w[0], w[1]}) == median_oracle(img, w[0], w[1]));
    }
}

TEST_CASE("median output values come from the input value set") {
    Rng rng(77);
    const GrayImage img = random_image(rng, 10, 10, 8);
    const std::set<std::uint16_t> input_values(img.pixels.begin(), img.pixels.end());
    const GrayImage out = median_filter(img, {5, 5});
    for (auto px : out.pixels)
        CHECK(input_values.count(px) == 1);
}

TEST_CASE("sparse impulses never reach the median output") {
    // fewer than half the pixels of every 3x3 window corrupted: one impulse
    // per disjoint 4x4 tile can contribute at most 2 pixels to any window
    Rng rng(500);
    for (int trial = 0; trial < 100; ++trial) {
        GrayImage img = random_image(rng, 12, 12, 4096);
        for (auto& px : img.pixels)
            px = static_cast<std::uint16_t>(8000 + px); // clean band [8000, 12096)
        for (int tr = 0; tr < 3; ++tr)
            for (int tc = 0; tc < 3; ++tc) {
                const int r = tr * 4 + static_cast<int>(rng.uniform_int(4));
                const int c = tc * 4 + static_cast<int>(rng.uniform_int(4));
                img.at(r, c) = rng.uniform() < 0.5 ? 0 : 65535;
            }
        const GrayImage out = median_filter(img, {3, 3});
        for (auto px : out.pixels) {
            CHECK(px >= 8000);
            CHECK(px < 8000 + 4096);
        }
    }
}

TEST_CASE("even or non-positive windows are rejected") {
    const GrayImage img(4, 4, 0);
    CHECK_THROWS_AS(median_filter(img, {2, 3}), argument_error);
    CHECK_THROWS_AS(median_filter(img, {3, 4}), argument_error);
    CHECK_THROWS_AS(median_filter(img, {0, 1}), argument_error);
    CHECK_THROWS_AS(median_filter(img, {-3, 3}), argument_error);
}

TEST_CASE("equalizing a constant image saturates to the top level") {
    const GrayImage img(6, 4, 31000);
    const GrayImage out = equalize_histogram(img, 256);
    for (auto px : out.pixels)
        CHECK(px == 65535);
}

TEST_CASE("two-value image follows the CDF arithmetic") {
    // 25% at the low value: CDF(low) = 0.25 -> level round(255 * 0.25) = 64
    GrayImage img(4, 4, 40000);
    img.at(0, 0) = 100;
    img.at(0, 1) = 100;
    img.at(0, 2) = 100;
    img.at(0, 3) = 100;
    const GrayImage out = equalize_histogram(img, 256);
    const auto low = out.at(0, 0);
    const auto high = out.at(1, 0);
    CHECK(low == static_cast<std::uint16_t>(std::lround(64.0 * 65535.0 / 255.0)));
    CHECK(high == 65535);
}

TEST_CASE("equalization is monotone in the input value") {
    Rng rng(9);
    const GrayImage img = random_image(rng, 16, 16, 65536);
    const GrayImage out = equalize_histogram(img, 64);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        for (std::size_t j = 0; j < img.pixels.size(); ++j)
            if (img.pixels[i] <= img.pixels[j])
                CHECK(out.pixels[i] <= out.pixels[j]);
}

TEST_CASE("equalized CDF tracks the uniform CDF on continuous images") {
    Rng rng(31);
    const int levels = 256;
    const GrayImage img = random_image(rng, 64, 64, 65536);
    const GrayImage out = equalize_histogram(img, levels);

    // empirical CDF over the L output levels vs uniform
    std::vector<double> cdf(levels, 0.0);
    for (auto px : out.pixels) {
        const int level = static_cast<int>(std::lround(px * double(levels - 1) / 65535.0));
        cdf[level] += 1.0;
    }
    double running = 0.0;
    for (int l = 0; l < levels; ++l) {
        running += cdf[l] / double(out.size());
        const double uniform = double(l + 1) / levels;
        CHECK(std::abs(running - uniform) <= 1.0 / levels + 1e-12);
    }
}

TEST_CASE("equalization rejects fewer than two levels") {
    const GrayImage img(4, 4, 0);
    CHECK_THROWS_AS(equalize_histogram(img, 1), argument_error);
    CHECK_THROWS_AS(equalize_histogram(img, 0), argument_error);
}
