#include "lungpipe/knn.hpp"

#include <algorithm>

#include "lungpipe/errors.hpp"

namespace lungpipe {

KnnModel fit_knn(const StandardizedDesign& design, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > design.n())
        throw argument_error("fit_knn: k out of range [1, n]");
    KnnModel model;
    model.train_x = design.x;
    model.train_y = design.y;
    model.k = k;
    return model;
}

int predict_knn(const KnnModel& model, const std::vector<double>& x) {
    if (x.size() != model.train_x.cols)
        throw argument_error("predict_knn: row width mismatch");
    const std::size_t n = model.train_x.rows;

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = model.train_x(i, j) - x[j];
            d2 += d * d;
        }
        ranked.emplace_back(d2, i);
    }
    std::sort(ranked.begin(), ranked.end());

    int votes = 0;
    for (int i = 0; i < model.k; ++i)
        votes += model.train_y[ranked[static_cast<std::size_t>(i)].second];
    return 2 * votes > model.k ? 1 : 0;
}

} // namespace lungpipe
