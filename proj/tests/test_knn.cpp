#include "doctest.h"

#include <algorithm>
#include <utility>
#include <vector>

#include "lungpipe/errors.hpp"
#include "lungpipe/knn.hpp"
#include "lungpipe/rng.hpp"

using namespace lungpipe;

namespace {

StandardizedDesign random_design(Rng& rng, std::size_t n, std::size_t p) {
    StandardizedDesign design;
    design.x = Matrix(n, p);
    design.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        design.y[i] = rng.uniform() < 0.5;
        for (std::size_t j = 0; j < p; ++j)
            design.x(i, j) = rng.uniform(-1.0, 1.0);
    }
    for (std::size_t j = 0; j < p; ++j)
        design.feature_names.push_back("x" + std::to_string(j + 1));
    return design;
}

int predict_oracle(const StandardizedDesign& design, const std::vector<double>& x, int k) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < design.n(); ++i) {
        double d2 = 0;
        for (std::size_t j = 0; j < design.p(); ++j) {
            const double diff = design.x(i, j) - x[j];
            d2 += diff * diff;
        }
        order.emplace_back(d2, i);
    }
    std::sort(order.begin(), order.end());
    int votes = 0;
    for (int i = 0; i < k; ++i)
        votes += design.y[order[i].second];
    return 2 * votes > k;
}

} // namespace

TEST_CASE("k=1 returns each training point's own label") {
    Rng rng(131);
    const StandardizedDesign design = random_design(rng, 30, 3);
    const KnnModel model = fit_knn(design, 1);
    for (std::size_t i = 0; i < design.n(); ++i) {
        std::vector<double> x(design.p());
        for (std::size_t j = 0; j < design.p(); ++j)
            x[j] = design.x(i, j);
        CHECK(predict_knn(model, x) == design.y[i]);
    }
}

TEST_CASE("k=n votes the global majority") {
    Rng rng(132);
    StandardizedDesign design = random_design(rng, 21, 2);
    int ones = 0;
    for (int label : design.y)
        ones += label;
    const int majority = 2 * ones > 21;
    const KnnModel model = fit_knn(design, 21);
    for (int trial = 0; trial < 20; ++trial)
        CHECK(predict_knn(model, {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}) == majority);

    // even split: the tie goes to class 0 everywhere
    StandardizedDesign even = random_design(rng, 20, 2);
    for (std::size_t i = 0; i < 20; ++i)
        even.y[i] = i < 10;
    const KnnModel tied = fit_knn(even, 20);
    for (int trial = 0; trial < 20; ++trial)
        CHECK(predict_knn(tied, {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}) == 0);
}

TEST_CASE("predictions match a sorted-distance oracle") {
    Rng rng(133);
    for (int trial = 0; trial < 50; ++trial) {
        const StandardizedDesign design = random_design(rng, 25, 4);
        for (int k : {1, 3, 5, 7}) {
            const KnnModel model = fit_knn(design, k);
            std::vector<double> x(4);
            for (auto& v : x)
                v = rng.uniform(-1.5, 1.5);
            CHECK(predict_knn(model, x) == predict_oracle(design, x, k));
        }
    }
}

TEST_CASE("distance ties break toward the earlier training row") {
    StandardizedDesign design;
    design.x = Matrix(2, 2);
    design.x(0, 0) = 1.0;
    design.x(0, 1) = 2.0;
    design.x(1, 0) = 1.0;
    design.x(1, 1) = 2.0;
    design.y = {1, 0};
    design.feature_names = {"x1", "x2"};
    CHECK(predict_knn(fit_knn(design, 1), {1.0, 2.0}) == 1);
    // both rows vote: one each, even vote falls to class 0
    CHECK(predict_knn(fit_knn(design, 2), {1.0, 2.0}) == 0);
}

TEST_CASE("k outside [1, n] is rejected") {
    Rng rng(134);
    const StandardizedDesign design = random_design(rng, 10, 2);
    CHECK_THROWS_AS(fit_knn(design, 0), argument_error);
    CHECK_THROWS_AS(fit_knn(design, 11), argument_error);
    CHECK_NOTHROW(fit_knn(design, 10));
}
