#include "lungpipe/kmeans.hpp"

#include <cmath>
#include <limits>

#include "lungpipe/errors.hpp"

namespace lungpipe {

namespace {

double row_dist2(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double d2 = 0;
    for (std::size_t c = 0; c < a.cols; ++c) {
        const double d = a(i, c) - b(j, c);
        d2 += d * d;
    }
    return d2;
}

struct Run {
    Matrix centroids;
    std::vector<int> assignments;
    std::vector<double> trace;
    double objective = std::numeric_limits<double>::infinity();
};

// 2x within-cluster SSE, accumulated in point order.
double run_objective(const StandardizedDesign& design, const Matrix& centroids,
                     const std::vector<int>& assignments) {
    double total = 0;
    for (std::size_t i = 0; i < design.n(); ++i)
        total += 2.0 * row_dist2(design.x, i, centroids, static_cast<std::size_t>(assignments[i]));
    return total;
}

Run lloyd(const StandardizedDesign& design, int k, Rng rng) {
    const std::size_t n = design.n();
    const std::size_t p = design.p();
    const std::size_t kk = static_cast<std::size_t>(k);

    Run run;
    run.centroids = Matrix(kk, p);
    auto set_centroid = [&](std::size_t c, std::size_t row) {
        for (std::size_t j = 0; j < p; ++j)
            run.centroids(c, j) = design.x(row, j);
    };

    // k-means++ seeding
    set_centroid(0, rng.uniform_int(n));
    std::vector<double> d2(n);
    for (std::size_t c = 1; c < kk; ++c) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t cc = 0; cc < c; ++cc)
                best = std::min(best, row_dist2(design.x, i, run.centroids, cc));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0) {
            const double u = rng.uniform() * total;
            double cum = 0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (u < cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_int(n);
        }
        set_centroid(c, pick);
    }

    run.assignments.assign(n, -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = row_dist2(design.x, i, run.centroids, 0);
            for (std::size_t c = 1; c < kk; ++c) {
                const double d = row_dist2(design.x, i, run.centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.assignments[i] != static_cast<int>(best)) {
                run.assignments[i] = static_cast<int>(best);
                moved = true;
            }
        }
        run.trace.push_back(run_objective(design, run.centroids, run.assignments));
        if (!moved)
            break;

        std::vector<std::size_t> counts(kk, 0);
        Matrix sums(kk, p);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(run.assignments[i]);
            ++counts[c];
            for (std::size_t j = 0; j < p; ++j)
                sums(c, j) += design.x(i, j);
        }
        for (std::size_t c = 0; c < kk; ++c) {
            if (counts[c] == 0) {
                // re-seed at the point currently farthest from its centroid
                std::size_t far = 0;
                double far_d = -1;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = row_dist2(design.x, i, run.centroids,
                                               static_cast<std::size_t>(run.assignments[i]));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                set_centroid(c, far);
            } else {
                for (std::size_t j = 0; j < p; ++j)
                    run.centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
            }
        }
    }

    run.objective = run.trace.back();
    return run;
}

} // namespace

KMeansModel fit_kmeans(const StandardizedDesign& design, int k, std::uint64_t seed,
                       int restarts) {
    if (k < 1 || static_cast<std::size_t>(k) > design.n())
        throw argument_error("fit_kmeans: k out of range [1, n]");
    if (restarts < 1)
        throw argument_error("fit_kmeans: need at least 1 restart");

    const Rng master(seed);
    Run best;
    for (int r = 0; r < restarts; ++r) {
        Run run = lloyd(design, k, master.derive(static_cast<std::uint64_t>(r)));
        if (run.objective < best.objective)
            best = std::move(run);
    }

    KMeansModel model;
    model.centroids = std::move(best.centroids);
    model.assignments = std::move(best.assignments);
    model.objective_trace = std::move(best.trace);
    model.objective = best.objective;
    model.seed = seed;
    model.restarts = restarts;

    // cluster -> label: for K = 2, the better of the two bijections on the
    // training assignments; otherwise each cluster takes its majority label
    model.cluster_to_label.assign(static_cast<std::size_t>(k), 0);
    if (k == 2) {
        std::size_t agree = 0;
        for (std::size_t i = 0; i < design.n(); ++i)
            agree += design.y[i] == model.assignments[i];
        if (2 * agree >= design.n()) {
            model.cluster_to_label = {0, 1};
        } else {
            model.cluster_to_label = {1, 0};
        }
    } else {
        for (int c = 0; c < k; ++c) {
            std::size_t n0 = 0, n1 = 0;
            for (std::size_t i = 0; i < design.n(); ++i) {
                if (model.assignments[i] != c)
                    continue;
                (design.y[i] ? n1 : n0) += 1;
            }
            model.cluster_to_label[static_cast<std::size_t>(c)] = n1 > n0 ? 1 : 0;
        }
    }
    return model;
}

int assign_cluster(const KMeansModel& model, const std::vector<double>& x) {
    if (x.size() != model.centroids.cols)
        throw argument_error("assign_cluster: row width mismatch");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.centroids.rows; ++c) {
        double d2 = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - model.centroids(c, j);
            d2 += d * d;
        }
        if (d2 < best_d) {
            best_d = d2;
            best = c;
        }
    }
    return static_cast<int>(best);
}

int predict_kmeans(const KMeansModel& model, const std::vector<double>& x) {
    return model.cluster_to_label[static_cast<std::size_t>(assign_cluster(model, x))];
}

double kmeans_accuracy(const KMeansModel& model, const StandardizedDesign& design) {
    if (model.centroids.rows != 2)
        throw argument_error("kmeans_accuracy: requires K = 2");
    std::size_t agree = 0;
    std::vector<double> row(design.p());
    for (std::size_t i = 0; i < design.n(); ++i) {
        for (std::size_t j = 0; j < design.p(); ++j)
            row[j] = design.x(i, j);
        agree += assign_cluster(model, row) == design.y[i];
    }
    const double acc = static_cast<double>(agree) / static_cast<double>(design.n());
    return std::max(acc, 1.0 - acc);
}

} // namespace lungpipe
