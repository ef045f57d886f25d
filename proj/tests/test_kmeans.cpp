#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "lungpipe/errors.hpp"
#include "lungpipe/kmeans.hpp"
#include "lungpipe/rng.hpp"

using namespace lungpipe;

namespace {

StandardizedDesign blob_design(Rng& rng, std::size_t n_per_class, double shift,
                               double sigma) {
    StandardizedDesign design;
    design.x = Matrix(2 * n_per_class, 2);
    design.y.resize(2 * n_per_class);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int label = i % 2;
        design.y[i] = label;
        design.x(i, 0) = rng.normal() * sigma + (label ? shift : -shift);
        design.x(i, 1) = rng.normal() * sigma;
    }
    design.feature_names = {"x1", "x2"};
    return design;
}

double pairwise_objective(const StandardizedDesign& design, const std::vector<int>& member,
                          int k) {
    double total = 0;
    for (int klass = 0; klass < k; ++klass) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < design.n(); ++i)
            if (member[i] == klass)
                rows.push_back(i);
        if (rows.empty())
            continue;
        double within = 0;
        for (std::size_t a : rows)
            for (std::size_t b : rows) {
                double d2 = 0;
                for (std::size_t j = 0; j < design.p(); ++j) {
                    const double diff = design.x(a, j) - design.x(b, j);
                    d2 += diff * diff;
                }
                within += d2;
            }
        total += within / rows.size();
    }
    return total;
}

} // namespace

TEST_CASE("n points in n clusters cost nothing") {
    Rng rng(161);
    StandardizedDesign design;
    design.x = Matrix(4, 2);
    design.y = {0, 1, 0, 1};
    for (std::size_t i = 0; i < 4; ++i) {
        design.x(i, 0) = static_cast<double>(i) * 3;
        design.x(i, 1) = static_cast<double>(i % 2);
    }
    design.feature_names = {"x1", "x2"};
    const KMeansModel model = fit_kmeans(design, 4, 7, 3);
    CHECK(model.objective == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<bool> seen(4, false);
    for (int a : model.assignments) {
        REQUIRE(a >= 0);
        REQUIRE(a < 4);
        CHECK(!seen[static_cast<std::size_t>(a)]);
        seen[static_cast<std::size_t>(a)] = true;
    }
}

TEST_CASE("the stored objective equals the pairwise definition") {
    Rng rng(162);
    const StandardizedDesign design = blob_design(rng, 30, 1.0, 0.8);
    for (int k : {2, 3}) {
        const KMeansModel model = fit_kmeans(design, k, 19, 4);
        const double direct = pairwise_objective(design, model.assignments, k);
        CHECK(model.objective == doctest::Approx(direct).epsilon(1e-9));

        // and twice the centroid SSE
        double sse = 0;
        for (std::size_t i = 0; i < design.n(); ++i) {
            const int c = model.assignments[i];
            for (std::size_t j = 0; j < design.p(); ++j) {
                const double diff = design.x(i, j) - model.centroids(static_cast<std::size_t>(c), j);
                sse += diff * diff;
            }
        }
        CHECK(model.objective == doctest::Approx(2 * sse).epsilon(1e-9));
    }
}

TEST_CASE("Lloyd iterations never increase the objective") {
    Rng rng(163);
    const StandardizedDesign design = blob_design(rng, 40, 0.8, 1.0);
    const KMeansModel model = fit_kmeans(design, 3, 31, 1);
    REQUIRE(!model.objective_trace.empty());
    for (std::size_t i = 1; i < model.objective_trace.size(); ++i)
        CHECK(model.objective_trace[i] <= model.objective_trace[i - 1] + 1e-9);
    CHECK(model.objective == doctest::Approx(model.objective_trace.back()).epsilon(1e-12));
}

TEST_CASE("training rows score their stored assignment") {
    Rng rng(164);
    const StandardizedDesign design = blob_design(rng, 25, 1.2, 0.7);
    const KMeansModel model = fit_kmeans(design, 2, 13, 3);
    for (std::size_t i = 0; i < design.n(); ++i)
        CHECK(assign_cluster(model, {design.x(i, 0), design.x(i, 1)}) == model.assignments[i]);
}

TEST_CASE("well-separated blobs cluster perfectly either way labels map") {
    Rng rng(165);
    StandardizedDesign design = blob_design(rng, 30, 3.0, 0.4);
    const KMeansModel model = fit_kmeans(design, 2, 3, 5);
    CHECK(kmeans_accuracy(model, design) == 1.0);
    for (std::size_t i = 0; i < design.n(); ++i)
        CHECK(predict_kmeans(model, {design.x(i, 0), design.x(i, 1)}) == design.y[i]);

    StandardizedDesign flipped = design;
    for (auto& label : flipped.y)
        label = 1 - label;
    CHECK(kmeans_accuracy(model, flipped) == 1.0);
}

TEST_CASE("random labels give near-chance accuracy") {
    Rng rng(166);
    StandardizedDesign design;
    const std::size_t n = 2000;
    design.x = Matrix(n, 2);
    design.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        design.y[i] = rng.uniform() < 0.5;
        design.x(i, 0) = rng.normal();
        design.x(i, 1) = rng.normal();
    }
    design.feature_names = {"x1", "x2"};
    const KMeansModel model = fit_kmeans(design, 2, 29, 3);
    const double acc = kmeans_accuracy(model, design);
    CHECK(acc >= 0.5); // the better bijection can't do worse than chance
    CHECK(acc <= 0.56);
}

TEST_CASE("restarts keep the best objective") {
    Rng rng(167);
    const StandardizedDesign design = blob_design(rng, 35, 0.6, 1.1);
    const KMeansModel once = fit_kmeans(design, 4, 41, 1);
    const KMeansModel many = fit_kmeans(design, 4, 41, 6);
    CHECK(many.objective <= once.objective + 1e-12);
}

TEST_CASE("the same seed reproduces the run") {
    Rng rng(168);
    const StandardizedDesign design = blob_design(rng, 30, 0.9, 0.9);
    const KMeansModel a = fit_kmeans(design, 3, 55, 4);
    const KMeansModel b = fit_kmeans(design, 3, 55, 4);
    CHECK(a.objective == b.objective);
    CHECK(a.assignments == b.assignments);
    for (std::size_t i = 0; i < a.centroids.rows * a.centroids.cols; ++i)
        CHECK(a.centroids.data[i] == b.centroids.data[i]);
}

TEST_CASE("cluster counts and restart counts are validated") {
    Rng rng(169);
    const StandardizedDesign design = blob_design(rng, 5, 1.0, 0.5);
    CHECK_THROWS_AS(fit_kmeans(design, 0, 1, 1), argument_error);
    CHECK_THROWS_AS(fit_kmeans(design, 11, 1, 1), argument_error);
    CHECK_THROWS_AS(fit_kmeans(design, 2, 1, 0), argument_error);
    CHECK_THROWS_AS(kmeans_accuracy(fit_kmeans(design, 3, 1, 1), design), argument_error);
}
