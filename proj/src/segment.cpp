#include "lungpipe/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>

#include "lungpipe/errors.hpp"
#include "lungpipe/morphology.hpp"

namespace lungpipe {

GradientImage sobel_gradient(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw argument_error("sobel_gradient: image must be at least 3x3");

    GradientImage out(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            // column differences weighted 1-2-1 across rows, and transposed for Gy
            std::int64_t gx = 0, gy = 0;
            for (int d = -1; d <= 1; ++d) {
                const int wrow = d == 0 ? 2 : 1;
                gx += static_cast<std::int64_t>(wrow) *
                      (static_cast<std::int64_t>(img.at_clamped(r + d, c + 1)) - img.at_clamped(r + d, c - 1));
                gy += static_cast<std::int64_t>(wrow) *
                      (static_cast<std::int64_t>(img.at_clamped(r + 1, c + d)) - img.at_clamped(r - 1, c + d));
            }
            out.at(r, c) = std::sqrt(static_cast<double>(gx * gx + gy * gy));
        }
    }
    return out;
}

int otsu_threshold(const GrayImage& img) {
    std::array<std::uint64_t, 65536> hist{};
    for (std::uint16_t v : img.pixels)
        ++hist[v];

    const double total = static_cast<double>(img.size());
    double total_sum = 0;
    for (int v = 0; v < 65536; ++v)
        total_sum += static_cast<double>(v) * static_cast<double>(hist[v]);

    double best = -1.0;
    int best_t = -1;
    double w0 = 0, sum0 = 0;
    for (int t = 0; t < 65535; ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
        const double w1 = total - w0;
        if (w0 == 0 || w1 == 0)
            continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_sum - sum0) / w1;
        const double diff = mu0 - mu1;
        const double between = w0 * w1 * diff * diff;
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    if (best_t < 0)
        throw segmentation_error("otsu_threshold: degenerate histogram (single gray value)");
    return best_t;
}

BinaryMask make_internal_marker(const GrayImage& img, const InternalMarkerOptions& opts) {
    const int threshold = otsu_threshold(img);

    BinaryMask dark(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        dark.pixels[i] = img.pixels[i] <= threshold ? 1 : 0;

    BinaryMask interior = remove_border_components(dark);
    const ComponentLabels comps = label_mask(interior, 8);
    if (comps.count == 0)
        throw segmentation_error("make_internal_marker: no interior component found");

    const auto areas = component_areas(comps);
    std::vector<int> order(comps.count);
    for (int i = 0; i < comps.count; ++i)
        order[i] = i + 1;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (areas[a] != areas[b])
            return areas[a] > areas[b];
        return a < b;
    });

    std::vector<bool> keep(static_cast<std::size_t>(comps.count) + 1, false);
    keep[order[0]] = true;
    if (comps.count > 1 &&
        static_cast<double>(areas[order[1]]) >= opts.second_component_ratio * static_cast<double>(areas[order[0]]))
        keep[order[1]] = true;

    BinaryMask selected(img.width, img.height);
    for (std::size_t i = 0; i < selected.pixels.size(); ++i)
        selected.pixels[i] = (comps.labels[i] > 0 && keep[comps.labels[i]]) ? 1 : 0;

    BinaryMask filled = fill_holes(selected);
    BinaryMask marker = opts.erosion > 0 ? erode(filled, opts.erosion) : filled;
    if (!marker.any())
        throw segmentation_error("make_internal_marker: marker empty after erosion");
    return marker;
}

BinaryMask make_external_marker(const BinaryMask& internal, double dilate_radius) {
    if (!internal.any())
        throw argument_error("make_external_marker: internal marker is empty");
    if (internal.count() == internal.size())
        throw segmentation_error("make_external_marker: internal marker covers the entire image");
    if (dilate_radius < 1)
        throw argument_error("make_external_marker: dilate radius must be >= 1");

    const ComponentLabels comps = label_mask(internal, 8);
    if (comps.count >= 2) {
        // equidistant ridge between components: watershed of the distance
        // transform seeded by the components themselves
        const auto dist = squared_distance_transform(internal);
        GradientImage surface(internal.width, internal.height);
        surface.magnitudes = dist;
        MarkerMap markers(internal.width, internal.height);
        markers.labels.assign(comps.labels.begin(), comps.labels.end());
        const LabeledRegions regions = watershed(surface, markers);
        BinaryMask external(internal.width, internal.height);
        for (std::size_t i = 0; i < external.pixels.size(); ++i)
            external.pixels[i] = regions.basin[i] == 0 ? 1 : 0;
        if (!external.any())
            throw segmentation_error("make_external_marker: no ridge between marker components");
        return external;
    }

    const BinaryMask dilated = dilate(internal, dilate_radius);
    BinaryMask external = boundary(dilated);
    for (std::size_t i = 0; i < external.pixels.size(); ++i)
        if (internal.pixels[i])
            external.pixels[i] = 0;
    if (!external.any())
        throw segmentation_error("make_external_marker: dilated boundary is empty");
    return external;
}

MarkerMap MarkerMap::from_masks(const BinaryMask& internal, const BinaryMask& external) {
    if (internal.width != external.width || internal.height != external.height)
        throw argument_error("MarkerMap: mask dimensions differ");
    if (!internal.any() || !external.any())
        throw argument_error("MarkerMap: internal and external markers must be non-empty");
    MarkerMap m(internal.width, internal.height);
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        if (internal.pixels[i] && external.pixels[i])
            throw argument_error("MarkerMap: internal and external markers overlap");
        if (internal.pixels[i])
            m.labels[i] = 1;
        else if (external.pixels[i])
            m.labels[i] = 2;
    }
    return m;
}

namespace {

struct QueueEntry {
    double priority;
    std::uint64_t seq;
    int index;
};

struct QueueOrder {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.priority != b.priority)
            return a.priority > b.priority;
        return a.seq > b.seq;
    }
};

} // namespace

LabeledRegions watershed(const GradientImage& grad, const MarkerMap& markers) {
    if (grad.width != markers.width || grad.height != markers.height)
        throw argument_error("watershed: gradient and marker dimensions differ");

    const int w = grad.width, h = grad.height;
    const std::size_t n = grad.magnitudes.size();

    LabeledRegions out;
    out.width = w;
    out.height = h;

    // seeds: 8-connected components of equal nonzero marker class
    constexpr int kOff8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
    constexpr int kOff4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
    constexpr std::int32_t kUnlabeled = -1;

    std::vector<std::int32_t> basin(n, kUnlabeled);
    out.basin_class.assign(1, 0);
    std::vector<int> stack;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * w + c;
            const std::int32_t cls = markers.labels[idx];
            if (cls == 0 || basin[idx] != kUnlabeled)
                continue;
            const std::int32_t id = ++out.region_count;
            out.basin_class.push_back(cls);
            basin[idx] = id;
            stack.push_back(static_cast<int>(idx));
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cr = cur / w, cc = cur % w;
                for (const auto& off : kOff8) {
                    const int nr = cr + off[0], nc = cc + off[1];
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w)
                        continue;
                    const std::size_t nidx = static_cast<std::size_t>(nr) * w + nc;
                    if (markers.labels[nidx] == cls && basin[nidx] == kUnlabeled) {
                        basin[nidx] = id;
                        stack.push_back(static_cast<int>(nidx));
                    }
                }
            }
        }
    }
    if (out.region_count == 0)
        throw argument_error("watershed: markers contain no nonzero labels");

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue;
    std::vector<std::uint8_t> queued(n, 0);
    std::uint64_t seq = 0;

    auto enqueue_neighbors = [&](int r, int c) {
        for (const auto& off : kOff4) {
            const int nr = r + off[0], nc = c + off[1];
            if (nr < 0 || nr >= h || nc < 0 || nc >= w)
                continue;
            const std::size_t nidx = static_cast<std::size_t>(nr) * w + nc;
            if (basin[nidx] == kUnlabeled && !queued[nidx]) {
                queued[nidx] = 1;
                queue.push({grad.magnitudes[nidx], seq++, static_cast<int>(nidx)});
            }
        }
    };

    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (basin[static_cast<std::size_t>(r) * w + c] > 0)
                enqueue_neighbors(r, c);

    while (!queue.empty()) {
        const QueueEntry entry = queue.top();
        queue.pop();
        const int idx = entry.index;
        const int r = idx / w, c = idx % w;

        std::int32_t found = 0;
        bool conflict = false;
        for (const auto& off : kOff4) {
            const int nr = r + off[0], nc = c + off[1];
            if (nr < 0 || nr >= h || nc < 0 || nc >= w)
                continue;
            const std::int32_t nb = basin[static_cast<std::size_t>(nr) * w + nc];
            if (nb > 0) {
                if (found == 0)
                    found = nb;
                else if (found != nb)
                    conflict = true;
            }
        }
        // floods arriving from distinct basins meet here: ridge. A pixel with
        // no labeled neighbor can only have been queued by a ridge; it joins
        // the ridge as well.
        basin[idx] = (conflict || found == 0) ? 0 : found;
        enqueue_neighbors(r, c);
    }

    out.basin = std::move(basin);
    return out;
}

BinaryMask segment_lungs(const GrayImage& img, const SegmentOptions& opts) {
    const GradientImage grad = sobel_gradient(img);
    const BinaryMask internal = make_internal_marker(img, opts.internal);
    const BinaryMask external = make_external_marker(internal, opts.dilate_radius);
    const MarkerMap markers = MarkerMap::from_masks(internal, external);
    const LabeledRegions regions = watershed(grad, markers);

    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
        const std::int32_t b = regions.basin[i];
        mask.pixels[i] = (b > 0 && regions.basin_class[b] == 1) ? 1 : 0;
    }
    return mask;
}

} // namespace lungpipe
