#pragma once

#include <cstdint>
#include <vector>

#include "lungpipe/image.hpp"

namespace lungpipe {

struct NoduleSpec {
    double cx = 0;
    double cy = 0;
    double radius = 0;
    std::uint16_t intensity = 52000;
};

/// Synthetic chest-slice description: a dark lung-field ellipse on a bright
/// body background, optional bright nodules, optional salt-and-pepper noise.
struct PhantomSpec {
    int width = 128;
    int height = 128;
    std::uint16_t background = 46000;

    double ellipse_cx = 63.5;
    double ellipse_cy = 63.5;
    double ellipse_rx = 40;
    double ellipse_ry = 30;
    std::uint16_t lung_intensity = 12000;

    std::vector<NoduleSpec> nodules;

    double texture_sigma = 0.0; // gaussian intensity noise, applied first
    double salt_pepper = 0.0;   // fraction of pixels flipped to 0 or 65535
    std::uint64_t seed = 0;
};

struct Phantom {
    GrayImage image;
    BinaryMask nodule_mask; // exactly the nodule pixels, pre-noise
    BinaryMask lung_mask;   // the lung-field ellipse pixels, pre-noise
};

/// Deterministic for a fixed spec. Rasterization uses the center-inclusion
/// rule: a pixel belongs to a disk iff its center lies within the radius,
/// and to the ellipse iff the normalized center coordinates satisfy
/// (dx/rx)^2 + (dy/ry)^2 <= 1.
Phantom generate_phantom(const PhantomSpec& spec);

/// Pixel count of a rasterized disk under the same center-inclusion rule
/// the phantom generator uses (clipped to the image bounds).
std::size_t disk_pixel_count(int width, int height, double cx, double cy, double radius);

/// A reproducible family of varied phantom specs (ellipse geometry, nodule
/// count/size, noise level all drawn from the master seed). Specs with at
/// least one nodule represent the cancer class.
std::vector<PhantomSpec> phantom_suite(int count, std::uint64_t master_seed);

} // namespace lungpipe
