#include "lungpipe/morphology.hpp"

#include <limits>
#include <queue>

#include "lungpipe/errors.hpp"

namespace lungpipe {

namespace {

constexpr int kOffsets8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
constexpr int kOffsets4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};

constexpr double kUnreachable = 1e18;

} // namespace

ComponentLabels label_mask(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw argument_error("label_mask: connectivity must be 4 or 8");
    const auto* offsets = connectivity == 8 ? kOffsets8 : kOffsets4;
    const int n_off = connectivity;

    ComponentLabels out;
    out.width = mask.width;
    out.height = mask.height;
    out.labels.assign(mask.size(), 0);

    std::vector<int> stack;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * mask.width + c;
            if (!mask.pixels[idx] || out.labels[idx] != 0)
                continue;
            const std::int32_t id = ++out.count;
            out.labels[idx] = id;
            stack.push_back(static_cast<int>(idx));
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cr = cur / mask.width, cc = cur % mask.width;
                for (int k = 0; k < n_off; ++k) {
                    const int nr = cr + offsets[k][0], nc = cc + offsets[k][1];
                    if (nr < 0 || nr >= mask.height || nc < 0 || nc >= mask.width)
                        continue;
                    const std::size_t nidx = static_cast<std::size_t>(nr) * mask.width + nc;
                    if (mask.pixels[nidx] && out.labels[nidx] == 0) {
                        out.labels[nidx] = id;
                        stack.push_back(static_cast<int>(nidx));
                    }
                }
            }
        }
    }
    return out;
}

std::vector<std::size_t> component_areas(const ComponentLabels& labels) {
    std::vector<std::size_t> areas(static_cast<std::size_t>(labels.count) + 1, 0);
    for (auto l : labels.labels)
        if (l > 0)
            ++areas[l];
    return areas;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    BinaryMask reached(mask.width, mask.height);
    std::vector<int> stack;
    auto try_seed = [&](int r, int c) {
        if (!mask.at(r, c) && !reached.at(r, c)) {
            reached.set(r, c, true);
            stack.push_back(r * mask.width + c);
        }
    };
    for (int c = 0; c < mask.width; ++c) {
        try_seed(0, c);
        try_seed(mask.height - 1, c);
    }
    for (int r = 0; r < mask.height; ++r) {
        try_seed(r, 0);
        try_seed(r, mask.width - 1);
    }
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cr = cur / mask.width, cc = cur % mask.width;
        for (const auto& off : kOffsets4) {
            const int nr = cr + off[0], nc = cc + off[1];
            if (nr < 0 || nr >= mask.height || nc < 0 || nc >= mask.width)
                continue;
            if (!mask.at(nr, nc) && !reached.at(nr, nc)) {
                reached.set(nr, nc, true);
                stack.push_back(nr * mask.width + nc);
            }
        }
    }
    BinaryMask out = mask;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        if (!out.pixels[i] && !reached.pixels[i])
            out.pixels[i] = 1;
    return out;
}

BinaryMask remove_border_components(const BinaryMask& mask) {
    const ComponentLabels labels = label_mask(mask, 8);
    std::vector<bool> touches(static_cast<std::size_t>(labels.count) + 1, false);
    for (int c = 0; c < mask.width; ++c) {
        touches[labels.at(0, c)] = true;
        touches[labels.at(mask.height - 1, c)] = true;
    }
    for (int r = 0; r < mask.height; ++r) {
        touches[labels.at(r, 0)] = true;
        touches[labels.at(r, mask.width - 1)] = true;
    }
    BinaryMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
        const std::int32_t l = labels.labels[i];
        out.pixels[i] = (l > 0 && !touches[l]) ? 1 : 0;
    }
    return out;
}

namespace {

// 1-D squared-distance transform via the lower envelope of parabolas.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
           std::vector<double>& z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + static_cast<double>(q) * q) - (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + static_cast<double>(q) * q) - (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q)
            ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

std::vector<double> squared_distance_transform(const BinaryMask& seeds) {
    const int w = seeds.width, h = seeds.height;
    std::vector<double> dist(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i)
        dist[i] = seeds.pixels[i] ? 0.0 : kUnreachable;

    const int n_max = std::max(w, h);
    std::vector<double> f(n_max), d(n_max), z(n_max + 1);
    std::vector<int> v(n_max);

    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r)
            f[r] = dist[static_cast<std::size_t>(r) * w + c];
        dt_1d(f, d, v, z, h);
        for (int r = 0; r < h; ++r)
            dist[static_cast<std::size_t>(r) * w + c] = d[r];
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c)
            f[c] = dist[static_cast<std::size_t>(r) * w + c];
        dt_1d(f, d, v, z, w);
        for (int c = 0; c < w; ++c)
            dist[static_cast<std::size_t>(r) * w + c] = d[c];
    }
    return dist;
}

BinaryMask dilate(const BinaryMask& mask, double radius) {
    if (radius < 0)
        throw argument_error("dilate: radius must be >= 0");
    const auto dist = squared_distance_transform(mask);
    BinaryMask out(mask.width, mask.height);
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = dist[i] <= r2 ? 1 : 0;
    return out;
}

BinaryMask erode(const BinaryMask& mask, double radius) {
    if (radius < 0)
        throw argument_error("erode: radius must be >= 0");
    BinaryMask complement(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i)
        complement.pixels[i] = mask.pixels[i] ? 0 : 1;
    const auto dist = squared_distance_transform(complement);
    BinaryMask out(mask.width, mask.height);
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = (mask.pixels[i] && dist[i] > r2) ? 1 : 0;
    return out;
}

BinaryMask boundary(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c) {
            if (!mask.at(r, c))
                continue;
            for (const auto& off : kOffsets4) {
                const int nr = r + off[0], nc = c + off[1];
                if (nr >= 0 && nr < mask.height && nc >= 0 && nc < mask.width && !mask.at(nr, nc)) {
                    out.set(r, c, true);
                    break;
                }
            }
        }
    return out;
}

} // namespace lungpipe
