#include "lungpipe/phantom.hpp"

#include <cmath>

#include "lungpipe/errors.hpp"
#include "lungpipe/rng.hpp"

namespace lungpipe {

namespace {

bool in_disk(int row, int col, double cx, double cy, double r) {
    const double dx = col - cx, dy = row - cy;
    return dx * dx + dy * dy <= r * r;
}

void validate(const PhantomSpec& spec) {
    if (spec.width < 1 || spec.height < 1)
        throw argument_error("phantom: image dimensions must be >= 1");
    if (spec.salt_pepper < 0.0 || spec.salt_pepper > 1.0)
        throw argument_error("phantom: salt_pepper fraction must lie in [0, 1]");
    if (spec.texture_sigma < 0.0)
        throw argument_error("phantom: texture_sigma must be >= 0");
    if (spec.ellipse_rx <= 0 || spec.ellipse_ry <= 0)
        throw argument_error("phantom: ellipse radii must be positive");
    for (const auto& nod : spec.nodules) {
        if (nod.radius <= 0)
            throw argument_error("phantom: nodule radius must be positive");
        if (nod.cx - nod.radius < 0 || nod.cx + nod.radius > spec.width - 1 ||
            nod.cy - nod.radius < 0 || nod.cy + nod.radius > spec.height - 1)
            throw argument_error("phantom: nodule extends outside image bounds");
    }
}

} // namespace

Phantom generate_phantom(const PhantomSpec& spec) {
    validate(spec);

    Phantom out;
    out.image = GrayImage(spec.width, spec.height, spec.background);
    out.nodule_mask = BinaryMask(spec.width, spec.height);
    out.lung_mask = BinaryMask(spec.width, spec.height);

    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const double ex = (c - spec.ellipse_cx) / spec.ellipse_rx;
            const double ey = (r - spec.ellipse_cy) / spec.ellipse_ry;
            if (ex * ex + ey * ey <= 1.0) {
                out.image.at(r, c) = spec.lung_intensity;
                out.lung_mask.set(r, c, true);
            }
        }
    }
    for (const auto& nod : spec.nodules) {
        const int r0 = static_cast<int>(std::floor(nod.cy - nod.radius));
        const int r1 = static_cast<int>(std::ceil(nod.cy + nod.radius));
        const int c0 = static_cast<int>(std::floor(nod.cx - nod.radius));
        const int c1 = static_cast<int>(std::ceil(nod.cx + nod.radius));
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (out.image.in_bounds(r, c) && in_disk(r, c, nod.cx, nod.cy, nod.radius)) {
                    out.image.at(r, c) = nod.intensity;
                    out.nodule_mask.set(r, c, true);
                }
    }

    if (spec.texture_sigma > 0.0 || spec.salt_pepper > 0.0) {
        Rng rng(spec.seed);
        if (spec.texture_sigma > 0.0) {
            for (auto& px : out.image.pixels) {
                const double v = px + rng.normal() * spec.texture_sigma;
                px = static_cast<std::uint16_t>(
                    v <= 0.0 ? 0 : v >= 65535.0 ? 65535 : std::lround(v));
            }
        }
        if (spec.salt_pepper > 0.0) {
            for (auto& px : out.image.pixels) {
                if (rng.uniform() < spec.salt_pepper)
                    px = rng.uniform() < 0.5 ? 0 : 65535;
            }
        }
    }
    return out;
}

std::size_t disk_pixel_count(int width, int height, double cx, double cy, double radius) {
    std::size_t n = 0;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            n += in_disk(r, c, cx, cy, radius);
    return n;
}

std::vector<PhantomSpec> phantom_suite(int count, std::uint64_t master_seed) {
    if (count < 1)
        throw argument_error("phantom_suite: count must be >= 1");
    Rng master(master_seed);
    std::vector<PhantomSpec> specs;
    specs.reserve(count);
    for (int i = 0; i < count; ++i) {
        Rng rng = master.derive(static_cast<std::uint64_t>(i));
        PhantomSpec spec;
        spec.width = 128;
        spec.height = 128;
        spec.background = static_cast<std::uint16_t>(42000 + rng.uniform_int(8000));
        spec.lung_intensity = static_cast<std::uint16_t>(9000 + rng.uniform_int(6000));
        spec.ellipse_rx = rng.uniform(28.0, 44.0);
        spec.ellipse_ry = rng.uniform(22.0, 36.0);
        spec.ellipse_cx = spec.width / 2.0 - 0.5 + rng.uniform(-6.0, 6.0);
        spec.ellipse_cy = spec.height / 2.0 - 0.5 + rng.uniform(-6.0, 6.0);
        spec.texture_sigma = rng.uniform(250.0, 800.0);
        spec.salt_pepper = rng.uniform(0.0, 0.02);
        spec.seed = rng.next_u64();

        // even indices: no nodules (benign); odd: one to three nodules
        if (i % 2 == 1) {
            const int n_nodules = 1 + static_cast<int>(rng.uniform_int(3));
            for (int k = 0; k < n_nodules; ++k) {
                NoduleSpec nod;
                nod.radius = rng.uniform(3.0, 7.0);
                // place inside the ellipse with margin
                const double ang = rng.uniform(0.0, 6.283185307179586);
                const double frac = rng.uniform(0.0, 0.55);
                nod.cx = spec.ellipse_cx + std::cos(ang) * frac * spec.ellipse_rx;
                nod.cy = spec.ellipse_cy + std::sin(ang) * frac * spec.ellipse_ry;
                nod.intensity = static_cast<std::uint16_t>(50000 + rng.uniform_int(8000));
                spec.nodules.push_back(nod);
            }
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

} // namespace lungpipe
