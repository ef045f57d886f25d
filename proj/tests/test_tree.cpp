#include "doctest.h"

#include <cstddef>
#include <vector>

#include "lungpipe/errors.hpp"
#include "lungpipe/rng.hpp"
#include "lungpipe/tree.hpp"

using namespace lungpipe;

namespace {

StandardizedDesign design_from(const std::vector<std::vector<double>>& rows,
                               const std::vector<int>& y) {
    StandardizedDesign design;
    design.x = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            design.x(i, j) = rows[i][j];
    design.y = y;
    for (std::size_t j = 0; j < rows[0].size(); ++j)
        design.feature_names.push_back("x" + std::to_string(j + 1));
    return design;
}

StandardizedDesign random_design(Rng& rng, std::size_t n, std::size_t p,
                                 double flip = 0.0, double shift = 0.0) {
    StandardizedDesign design;
    design.x = Matrix(n, p);
    design.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2;
        design.y[i] = rng.uniform() < flip ? 1 - label : label;
        for (std::size_t j = 0; j < p; ++j)
            design.x(i, j) = rng.normal() + (label ? shift : -shift);
    }
    for (std::size_t j = 0; j < p; ++j)
        design.feature_names.push_back("x" + std::to_string(j + 1));
    return design;
}

double gini(std::size_t n0, std::size_t n1) {
    const double n = static_cast<double>(n0 + n1);
    if (n == 0)
        return 0;
    const double q0 = n0 / n, q1 = n1 / n;
    return 1 - q0 * q0 - q1 * q1;
}

int tree_depth(const TreeModel& model, int node = 0) {
    if (model.nodes[node].feature < 0)
        return 0;
    return 1 + std::max(tree_depth(model, model.nodes[node].left),
                        tree_depth(model, model.nodes[node].right));
}

bool is_pruned_subtree(const TreeModel& pruned, const TreeModel& full, int pn = 0,
                       int fn = 0) {
    const TreeNode& p = pruned.nodes[pn];
    const TreeNode& f = full.nodes[fn];
    if (p.feature < 0)
        return true; // collapsing an internal node to a leaf is allowed
    if (f.feature != p.feature || f.threshold != p.threshold)
        return false;
    return is_pruned_subtree(pruned, full, p.left, f.left) &&
           is_pruned_subtree(pruned, full, p.right, f.right);
}

} // namespace

TEST_CASE("pure labels make a single leaf") {
    const StandardizedDesign design =
        design_from({{1, 4}, {2, 5}, {3, 6}}, {1, 1, 1});
    const TreeModel model = fit_tree(design);
    REQUIRE(model.nodes.size() == 1);
    CHECK(model.nodes[0].feature == -1);
    CHECK(model.nodes[0].klass == 1);
    CHECK(model.leaf_count() == 1);
}

TEST_CASE("an unbalanced XOR layout needs exactly two levels") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    const int counts[4] = {5, 2, 4, 3}; // (0,0) (0,1) (1,0) (1,1)
    const int labels[4] = {0, 1, 1, 0};
    for (int q = 0; q < 4; ++q)
        for (int i = 0; i < counts[q]; ++i) {
            rows.push_back({static_cast<double>(q / 2), static_cast<double>(q % 2)});
            y.push_back(labels[q]);
        }
    const StandardizedDesign design = design_from(rows, y);
    const TreeModel model = fit_tree(design);
    CHECK(tree_depth(model) == 2);
    CHECK(model.leaf_count() == 4);
    for (std::size_t i = 0; i < design.n(); ++i)
        CHECK(predict_tree(model, {design.x(i, 0), design.x(i, 1)}) == design.y[i]);
}

TEST_CASE("every internal node strictly reduces Gini impurity") {
    Rng rng(141);
    const StandardizedDesign design = random_design(rng, 60, 3, 0.25, 0.8);
    const TreeModel model = fit_tree(design);

    // route the rows down and compare each parent against its children
    std::vector<std::vector<std::size_t>> members(model.nodes.size());
    for (std::size_t i = 0; i < design.n(); ++i) {
        int node = 0;
        members[0].push_back(i);
        while (model.nodes[node].feature >= 0) {
            const TreeNode& nd = model.nodes[node];
            node = design.x(i, nd.feature) < nd.threshold ? nd.left : nd.right;
            members[node].push_back(i);
        }
    }
    int internal = 0;
    for (std::size_t node = 0; node < model.nodes.size(); ++node) {
        const TreeNode& nd = model.nodes[node];
        CHECK(nd.n0 + nd.n1 == members[node].size());
        std::size_t ones = 0;
        for (auto i : members[node])
            ones += design.y[i];
        CHECK(nd.n1 == ones);
        if (nd.feature < 0)
            continue;
        ++internal;
        const TreeNode& l = model.nodes[nd.left];
        const TreeNode& r = model.nodes[nd.right];
        const double here = gini(nd.n0, nd.n1);
        const double split = (gini(l.n0, l.n1) * (l.n0 + l.n1) +
                              gini(r.n0, r.n1) * (r.n0 + r.n1)) /
                             (nd.n0 + nd.n1);
        CHECK(split < here);
    }
    CHECK(internal > 0);
}

TEST_CASE("stopping rules bound leaf size and depth") {
    Rng rng(142);
    const StandardizedDesign design = random_design(rng, 80, 2, 0.3, 0.5);

    TreeOptions options;
    options.min_leaf_size = 7;
    const TreeModel sized = fit_tree(design, options);
    for (const TreeNode& nd : sized.nodes)
        if (nd.feature < 0)
            CHECK(nd.n0 + nd.n1 >= 7);

    TreeOptions shallow;
    shallow.max_depth = 1;
    const TreeModel stump = fit_tree(design, shallow);
    CHECK(tree_depth(stump) <= 1);
    CHECK(stump.nodes.size() <= 3);
}

TEST_CASE("pruning a lone leaf changes nothing") {
    const StandardizedDesign design = design_from({{0.0}, {1.0}, {2.0}}, {0, 0, 0});
    const TreeModel model = fit_tree(design);
    const TreeModel pruned = prune_tree(model, design, 3, 7);
    CHECK(pruned.nodes.size() == 1);
    CHECK(pruned.nodes[0].feature == -1);
}

TEST_CASE("pure-noise trees usually collapse to the root") {
    int collapsed = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(900 + seed);
        StandardizedDesign design;
        design.x = Matrix(40, 2);
        design.y.resize(40);
        for (std::size_t i = 0; i < 40; ++i) {
            design.y[i] = rng.uniform() < 0.5;
            design.x(i, 0) = rng.normal();
            design.x(i, 1) = rng.normal();
        }
        design.feature_names = {"x1", "x2"};
        const TreeModel full = fit_tree(design);
        const TreeModel pruned = prune_tree(full, design, 5, seed);
        CHECK(pruned.nodes.size() <= full.nodes.size());
        collapsed += pruned.nodes.size() == 1;
    }
    CHECK(collapsed >= 14);
}

TEST_CASE("the pruned tree is a prefix of the full tree") {
    Rng rng(143);
    const StandardizedDesign design = random_design(rng, 70, 3, 0.2, 0.7);
    const TreeModel full = fit_tree(design);
    const TreeModel pruned = prune_tree(full, design, 10, 17);
    CHECK(pruned.nodes.size() <= full.nodes.size());
    CHECK(is_pruned_subtree(pruned, full));
}

TEST_CASE("a one-tree forest without bootstrap is a plain tree") {
    Rng rng(144);
    const StandardizedDesign design = random_design(rng, 50, 3, 0.2, 0.6);
    ForestOptions options;
    options.tree_count = 1;
    options.m = 3;
    options.bootstrap = false;
    const ForestModel forest = fit_forest(design, options);
    const TreeModel tree = fit_tree(design);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
        CHECK(predict_forest(forest, x) == predict_tree(tree, x));
    }
}

TEST_CASE("forests are reproducible from the seed") {
    Rng rng(145);
    const StandardizedDesign design = random_design(rng, 60, 3, 0.25, 0.6);
    ForestOptions options;
    options.tree_count = 15;
    options.seed = 99;
    const ForestModel a = fit_forest(design, options);
    const ForestModel b = fit_forest(design, options);
    REQUIRE(a.inbag.size() == b.inbag.size());
    for (std::size_t t = 0; t < a.inbag.size(); ++t)
        CHECK(a.inbag[t] == b.inbag[t]);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
        CHECK(predict_forest(a, x) == predict_forest(b, x));
    }
}

TEST_CASE("out-of-bag error is small on well-separated classes") {
    Rng rng(146);
    const StandardizedDesign design = random_design(rng, 100, 2, 0.0, 2.0);
    ForestOptions options;
    options.tree_count = 50;
    options.seed = 3;
    const ForestModel forest = fit_forest(design, options);
    CHECK(oob_error(forest, design) <= 0.10);
}

TEST_CASE("oob scoring needs the inbag counts") {
    Rng rng(147);
    const StandardizedDesign design = random_design(rng, 30, 2, 0.1, 1.0);
    ForestOptions options;
    options.tree_count = 10;
    ForestModel forest = fit_forest(design, options);
    forest.inbag.clear();
    CHECK_THROWS_AS(oob_error(forest, design), argument_error);
}

TEST_CASE("option ranges are validated") {
    Rng rng(148);
    const StandardizedDesign design = random_design(rng, 20, 2, 0.2, 0.5);
    TreeOptions bad_leaf;
    bad_leaf.min_leaf_size = 0;
    CHECK_THROWS_AS(fit_tree(design, bad_leaf), argument_error);
    TreeOptions bad_depth;
    bad_depth.max_depth = -1;
    CHECK_THROWS_AS(fit_tree(design, bad_depth), argument_error);
    const TreeModel model = fit_tree(design);
    CHECK_THROWS_AS(prune_tree(model, design, 1, 5), argument_error);
    ForestOptions bad_m;
    bad_m.m = 3; // p == 2
    CHECK_THROWS_AS(fit_forest(design, bad_m), argument_error);
    ForestOptions bad_count;
    bad_count.tree_count = 0;
    CHECK_THROWS_AS(fit_forest(design, bad_count), argument_error);
}
