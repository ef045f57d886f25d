#include "doctest.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "lungpipe/morphology.hpp"
#include "lungpipe/rng.hpp"

using namespace lungpipe;

namespace {

BinaryMask random_mask(Rng& rng, int w, int h, double density) {
    BinaryMask m(w, h);
    for (auto& px : m.pixels)
        px = rng.uniform() < density;
    return m;
}

// O(n^2) scan over all seed pixels
std::vector<double> edt_oracle(const BinaryMask& seeds) {
    std::vector<double> out(seeds.size(), std::numeric_limits<double>::infinity());
    for (int r = 0; r < seeds.height; ++r)
        for (int c = 0; c < seeds.width; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (int sr = 0; sr < seeds.height; ++sr)
                for (int sc = 0; sc < seeds.width; ++sc)
                    if (seeds.at(sr, sc)) {
                        const double d = double(r - sr) * (r - sr) + double(c - sc) * (c - sc);
                        best = std::min(best, d);
                    }
            out[static_cast<std::size_t>(r) * seeds.width + c] = best;
        }
    return out;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// partition equivalence oracle, independent of label numbering
std::vector<int> components_oracle(const BinaryMask& mask, int connectivity) {
    const int w = mask.width, h = mask.height;
    UnionFind uf(w * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c))
                continue;
            const int dr_max = 1, idx = r * w + c;
            for (int dr = -dr_max; dr <= dr_max; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0)
                        continue;
                    if (connectivity == 4 && dr != 0 && dc != 0)
                        continue;
                    const int nr = r + dr, nc = c + dc;
                    if (mask.in_bounds(nr, nc) && mask.at(nr, nc))
                        uf.unite(idx, nr * w + nc);
                }
        }
    std::vector<int> roots(mask.size(), -1);
    for (int i = 0; i < w * h; ++i)
        if (mask.pixels[i])
            roots[i] = uf.find(i);
    return roots;
}

} // namespace

TEST_CASE("label_mask agrees with a union-find oracle on random masks") {
    Rng rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        const BinaryMask mask = random_mask(rng, 11, 9, 0.4);
        for (int conn : {4, 8}) {
            const ComponentLabels labels = label_mask(mask, conn);
            const auto roots = components_oracle(mask, conn);

            // same-partition relation must match on every pixel pair
            for (std::size_t i = 0; i < mask.size(); ++i) {
                CHECK((labels.labels[i] != 0) == (mask.pixels[i] != 0));
                for (std::size_t j = i + 1; j < mask.size(); ++j) {
                    if (!mask.pixels[i] || !mask.pixels[j])
                        continue;
                    CHECK((labels.labels[i] == labels.labels[j]) == (roots[i] == roots[j]));
                }
            }
            // area bookkeeping
            const auto areas = component_areas(labels);
            CHECK(std::accumulate(areas.begin(), areas.end(), std::size_t{0}) == mask.count());
        }
    }
}

TEST_CASE("diagonal pixels connect under 8 but not 4") {
    BinaryMask mask(3, 3);
    mask.set(0, 0, true);
    mask.set(1, 1, true);
    CHECK(label_mask(mask, 8).count == 1);
    CHECK(label_mask(mask, 4).count == 2);
    CHECK_THROWS_AS(label_mask(mask, 6), argument_error);
}

TEST_CASE("fill_holes closes enclosed cavities only") {
    BinaryMask ring(7, 7);
    for (int r = 1; r <= 5; ++r)
        for (int c = 1; c <= 5; ++c)
            if (r == 1 || r == 5 || c == 1 || c == 5)
                ring.set(r, c, true);
    const BinaryMask filled = fill_holes(ring);
    for (int r = 1; r <= 5; ++r)
        for (int c = 1; c <= 5; ++c)
            CHECK(filled.at(r, c));
    CHECK_FALSE(filled.at(0, 0));
    CHECK(filled.count() == 25);

    // a notched ring leaks to the border and stays open
    BinaryMask notched = ring;
    notched.set(1, 3, false);
    CHECK(fill_holes(notched) == notched);
}

TEST_CASE("remove_border_components keeps only interior blobs") {
    BinaryMask mask(8, 8);
    mask.set(0, 3, true); // touches top
    mask.set(1, 3, true);
    mask.set(4, 4, true); // interior
    mask.set(4, 5, true);
    mask.set(7, 7, true); // corner
    const BinaryMask kept = remove_border_components(mask);
    CHECK(kept.count() == 2);
    CHECK(kept.at(4, 4));
    CHECK(kept.at(4, 5));
}

TEST_CASE("squared distance transform is exact on random masks") {
    Rng rng(88);
    for (int trial = 0; trial < 25; ++trial) {
        const BinaryMask seeds = random_mask(rng, 13, 10, trial == 0 ? 0.0 : 0.15);
        const auto fast = squared_distance_transform(seeds);
        if (!seeds.any()) {
            for (double d : fast)
                CHECK(d > 13.0 * 13.0 + 10.0 * 10.0); // sentinel beats any in-image distance
            continue;
        }
        const auto slow = edt_oracle(seeds);
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
    }
}

TEST_CASE("dilation of a point is a rasterized disk") {
    BinaryMask point(21, 21);
    point.set(10, 10, true);
    const BinaryMask disk = dilate(point, 5.0);
    for (int r = 0; r < 21; ++r)
        for (int c = 0; c < 21; ++c) {
            const double d2 = double(r - 10) * (r - 10) + double(c - 10) * (c - 10);
            CHECK(disk.at(r, c) == (d2 <= 25.0));
        }
}

TEST_CASE("dilate and erode match brute-force distance scans") {
    Rng rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask mask = random_mask(rng, 12, 12, 0.5);
        for (double radius : {0.0, 1.0, 1.5, 2.5}) {
            const BinaryMask grown = dilate(mask, radius);
            const BinaryMask shrunk = erode(mask, radius);
            for (int r = 0; r < mask.height; ++r)
                for (int c = 0; c < mask.width; ++c) {
                    double to_set = 1e18, to_complement = 1e18;
                    for (int qr = 0; qr < mask.height; ++qr)
                        for (int qc = 0; qc < mask.width; ++qc) {
                            const double d2 =
                                double(r - qr) * (r - qr) + double(c - qc) * (c - qc);
                            if (mask.at(qr, qc))
                                to_set = std::min(to_set, d2);
                            else
                                to_complement = std::min(to_complement, d2);
                        }
                    CHECK(grown.at(r, c) == (to_set <= radius * radius));
                    CHECK(shrunk.at(r, c) == (mask.at(r, c) && to_complement > radius * radius));
                }
        }
    }
    CHECK_THROWS_AS(dilate(random_mask(rng, 3, 3, 0.5), -1.0), argument_error);
}

TEST_CASE("boundary marks exactly the 4-exposed pixels") {
    BinaryMask square(6, 6);
    for (int r = 1; r <= 4; ++r)
        for (int c = 1; c <= 4; ++c)
            square.set(r, c, true);
    const BinaryMask edge = boundary(square);
    CHECK(edge.count() == 12);
    CHECK(edge.at(1, 1));
    CHECK_FALSE(edge.at(2, 2));
}
