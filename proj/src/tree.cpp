#include "lungpipe/tree.hpp"

#include <algorithm>
#include <cmath>

#include "lungpipe/errors.hpp"

namespace lungpipe {

std::size_t TreeModel::leaf_count() const {
    std::size_t leaves = 0;
    for (const auto& node : nodes)
        leaves += (node.feature < 0);
    return leaves;
}

namespace {

double gini(std::size_t n0, std::size_t n1) {
    const double n = static_cast<double>(n0 + n1);
    if (n == 0)
        return 0;
    const double p0 = n0 / n, p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct Builder {
    const Matrix& x;
    const std::vector<int>& y;
    TreeOptions opt;
    Rng* rng = nullptr; // null: consider every feature
    int m = 0;
    std::vector<TreeNode> nodes;

    std::vector<std::size_t> candidate_features() {
        const std::size_t p = x.cols;
        std::vector<std::size_t> pool(p);
        for (std::size_t j = 0; j < p; ++j)
            pool[j] = j;
        if (!rng || static_cast<std::size_t>(m) >= p)
            return pool;
        for (int i = 0; i < m; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) + rng->uniform_int(p - static_cast<std::size_t>(i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        pool.resize(static_cast<std::size_t>(m));
        return pool;
    }

    int build(std::vector<std::size_t>& rows, int depth) {
        TreeNode node;
        for (std::size_t i : rows)
            (y[i] ? node.n1 : node.n0) += 1;
        const std::size_t n = rows.size();
        node.p0 = static_cast<double>(node.n0) / static_cast<double>(n);
        node.p1 = static_cast<double>(node.n1) / static_cast<double>(n);
        node.klass = node.n1 > node.n0 ? 1 : 0;

        const int id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        const bool splittable = node.n0 > 0 && node.n1 > 0 && depth < opt.max_depth &&
                                n >= 2 * static_cast<std::size_t>(opt.min_leaf_size);
        if (!splittable)
            return id;

        const double parent_impurity = gini(node.n0, node.n1);
        double best_score = parent_impurity - 1e-12; // strict improvement required
        int best_feature = -1;
        double best_threshold = 0;

        std::vector<std::size_t> sorted = rows;
        for (std::size_t f : candidate_features()) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return x(a, f) < x(b, f);
            });
            std::size_t l0 = 0, l1 = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                (y[sorted[i]] ? l1 : l0) += 1;
                const double lo = x(sorted[i], f), hi = x(sorted[i + 1], f);
                if (!(hi > lo))
                    continue;
                const std::size_t nl = i + 1, nr = n - nl;
                if (nl < static_cast<std::size_t>(opt.min_leaf_size) ||
                    nr < static_cast<std::size_t>(opt.min_leaf_size))
                    continue;
                const double weighted =
                    (static_cast<double>(nl) * gini(l0, l1) +
                     static_cast<double>(nr) * gini(node.n0 - l0, node.n1 - l1)) /
                    static_cast<double>(n);
                if (weighted < best_score) {
                    best_score = weighted;
                    best_feature = static_cast<int>(f);
                    best_threshold = (lo + hi) / 2.0;
                }
            }
        }

        if (best_feature < 0)
            return id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : rows) {
            if (x(i, static_cast<std::size_t>(best_feature)) < best_threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }
        nodes[static_cast<std::size_t>(id)].feature = best_feature;
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = l;
        nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }
};

TreeModel fit_tree_rows(const StandardizedDesign& design, std::vector<std::size_t> rows,
                        const TreeOptions& options, Rng* rng, int m) {
    Builder b{design.x, design.y, options, rng, m, {}};
    b.build(rows, 0);
    TreeModel model;
    model.nodes = std::move(b.nodes);
    return model;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        rows[i] = i;
    return rows;
}

} // namespace

TreeModel fit_tree(const StandardizedDesign& design, const TreeOptions& options) {
    if (options.min_leaf_size < 1 || options.max_depth < 0)
        throw argument_error("fit_tree: bad stopping options");
    if (design.n() < 2 * static_cast<std::size_t>(options.min_leaf_size))
        throw argument_error("fit_tree: need at least 2 * min_leaf_size rows");
    return fit_tree_rows(design, all_rows(design.n()), options, nullptr, 0);
}

int predict_tree(const TreeModel& model, const std::vector<double>& x) {
    int at = 0;
    while (model.nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const TreeNode& node = model.nodes[static_cast<std::size_t>(at)];
        if (x.size() <= static_cast<std::size_t>(node.feature))
            throw argument_error("predict_tree: row width mismatch");
        at = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return model.nodes[static_cast<std::size_t>(at)].klass;
}

namespace {

// Walks the tree treating collapsed internal nodes as leaves.
int predict_collapsed(const TreeModel& model, const std::vector<char>& collapsed,
                      const std::vector<double>& x) {
    int at = 0;
    while (model.nodes[static_cast<std::size_t>(at)].feature >= 0 &&
           !collapsed[static_cast<std::size_t>(at)]) {
        const TreeNode& node = model.nodes[static_cast<std::size_t>(at)];
        at = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return model.nodes[static_cast<std::size_t>(at)].klass;
}

struct SubtreeStats {
    double leaf_error = 0;    // node as leaf: misclassified count
    double subtree_error = 0; // current effective leaves below
    std::size_t leaves = 0;
};

void subtree_stats(const TreeModel& model, const std::vector<char>& collapsed, int at,
                   std::vector<SubtreeStats>& out) {
    const TreeNode& node = model.nodes[static_cast<std::size_t>(at)];
    SubtreeStats s;
    s.leaf_error = static_cast<double>(std::min(node.n0, node.n1));
    if (node.feature < 0 || collapsed[static_cast<std::size_t>(at)]) {
        s.subtree_error = s.leaf_error;
        s.leaves = 1;
    } else {
        subtree_stats(model, collapsed, node.left, out);
        subtree_stats(model, collapsed, node.right, out);
        const auto& l = out[static_cast<std::size_t>(node.left)];
        const auto& r = out[static_cast<std::size_t>(node.right)];
        s.subtree_error = l.subtree_error + r.subtree_error;
        s.leaves = l.leaves + r.leaves;
    }
    out[static_cast<std::size_t>(at)] = s;
}

struct PruneSequence {
    std::vector<double> alphas;              // ascending, alphas[0] = 0
    std::vector<std::vector<char>> collapse; // aligned with alphas
};

// Weakest-link sequence: at each step every node whose per-leaf error price
// ties the minimum is collapsed.
PruneSequence prune_sequence(const TreeModel& model, double total_n) {
    PruneSequence seq;
    std::vector<char> collapsed(model.nodes.size(), 0);
    seq.alphas.push_back(0.0);
    seq.collapse.push_back(collapsed);

    std::vector<SubtreeStats> stats(model.nodes.size());
    while (true) {
        if (model.nodes[0].feature < 0 || collapsed[0])
            break;
        subtree_stats(model, collapsed, 0, stats);
        double gmin = 0;
        bool found = false;
        for (std::size_t t = 0; t < model.nodes.size(); ++t) {
            if (model.nodes[t].feature < 0 || collapsed[t] || stats[t].leaves < 2)
                continue;
            const double g = (stats[t].leaf_error - stats[t].subtree_error) /
                             (total_n * static_cast<double>(stats[t].leaves - 1));
            if (!found || g < gmin) {
                gmin = g;
                found = true;
            }
        }
        if (!found)
            break;
        for (std::size_t t = 0; t < model.nodes.size(); ++t) {
            if (model.nodes[t].feature < 0 || collapsed[t] || stats[t].leaves < 2)
                continue;
            const double g = (stats[t].leaf_error - stats[t].subtree_error) /
                             (total_n * static_cast<double>(stats[t].leaves - 1));
            if (g <= gmin + 1e-12)
                collapsed[t] = 1;
        }
        seq.alphas.push_back(gmin);
        seq.collapse.push_back(collapsed);
    }
    return seq;
}

// Collapse set of the smallest subtree optimal at complexity price alpha.
const std::vector<char>& collapse_at(const PruneSequence& seq, double alpha) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < seq.alphas.size(); ++i)
        if (seq.alphas[i] <= alpha)
            pick = i;
    return seq.collapse[pick];
}

void materialize(const TreeModel& model, const std::vector<char>& collapsed, int at,
                 std::vector<TreeNode>& out) {
    const TreeNode& node = model.nodes[static_cast<std::size_t>(at)];
    const int id = static_cast<int>(out.size());
    out.push_back(node);
    if (node.feature < 0 || collapsed[static_cast<std::size_t>(at)]) {
        out[static_cast<std::size_t>(id)].feature = -1;
        out[static_cast<std::size_t>(id)].left = -1;
        out[static_cast<std::size_t>(id)].right = -1;
        return;
    }
    const int l = static_cast<int>(out.size());
    materialize(model, collapsed, node.left, out);
    const int r = static_cast<int>(out.size());
    materialize(model, collapsed, node.right, out);
    out[static_cast<std::size_t>(id)].left = l;
    out[static_cast<std::size_t>(id)].right = r;
}

} // namespace

TreeModel prune_tree(const TreeModel& tree, const StandardizedDesign& design, int folds,
                     std::uint64_t seed, const TreeOptions& options) {
    if (folds < 2)
        throw argument_error("prune_tree: need at least 2 folds");
    if (tree.nodes.size() <= 1)
        return tree;

    const std::size_t n = design.n();
    const PruneSequence master = prune_sequence(tree, static_cast<double>(n));

    // candidate alphas: geometric means of neighbours, then one past the end
    std::vector<double> candidates;
    for (std::size_t i = 0; i + 1 < master.alphas.size(); ++i)
        candidates.push_back(std::sqrt(master.alphas[i] * master.alphas[i + 1]));
    candidates.push_back(2.0 * master.alphas.back() + 1e-8);

    Rng rng(seed);
    const std::vector<int> fold_of = stratified_folds(design.y, folds, rng);

    std::vector<std::size_t> errors(candidates.size(), 0);
    for (int v = 0; v < folds; ++v) {
        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < n; ++i)
            if (fold_of[i] != v)
                train_rows.push_back(i);
        if (train_rows.empty() || train_rows.size() == n)
            continue;
        const TreeModel fold_tree = fit_tree_rows(design, train_rows, options, nullptr, 0);
        const PruneSequence fold_seq =
            prune_sequence(fold_tree, static_cast<double>(train_rows.size()));

        std::vector<double> row(design.p());
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const auto& collapsed = collapse_at(fold_seq, candidates[c]);
            for (std::size_t i = 0; i < n; ++i) {
                if (fold_of[i] != v)
                    continue;
                for (std::size_t j = 0; j < design.p(); ++j)
                    row[j] = design.x(i, j);
                errors[c] += predict_collapsed(fold_tree, collapsed, row) != design.y[i];
            }
        }
    }

    std::size_t emin = errors[0];
    for (std::size_t e : errors)
        emin = std::min(emin, e);
    const double rate = static_cast<double>(emin) / static_cast<double>(n);
    const double se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
    const double allowance = (rate + se) * static_cast<double>(n);

    std::size_t pick = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c)
        if (static_cast<double>(errors[c]) <= allowance)
            pick = c; // last qualifying index: the largest alpha, smallest tree

    const auto& collapsed = collapse_at(master, candidates[pick]);
    TreeModel pruned;
    materialize(tree, collapsed, 0, pruned.nodes);
    return pruned;
}

ForestModel fit_forest(const StandardizedDesign& design, const ForestOptions& options) {
    const std::size_t p = design.p();
    if (options.tree_count < 1)
        throw argument_error("fit_forest: need at least one tree");
    int m = options.m;
    if (m == 0)
        m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
    if (m < 1 || static_cast<std::size_t>(m) > p)
        throw argument_error("fit_forest: m out of range [1, p]");

    ForestModel model;
    model.m = m;
    model.seed = options.seed;
    const Rng master(options.seed);
    const std::size_t n = design.n();

    for (int t = 0; t < options.tree_count; ++t) {
        Rng rng = master.derive(static_cast<std::uint64_t>(t));
        std::vector<std::size_t> rows;
        std::vector<std::uint32_t> counts(n, 0);
        if (options.bootstrap) {
            rows.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = rng.uniform_int(n);
                rows.push_back(r);
                ++counts[r];
            }
        } else {
            rows = all_rows(n);
            for (auto& c : counts)
                c = 1;
        }
        model.trees.push_back(fit_tree_rows(design, std::move(rows), options.tree, &rng, m));
        model.inbag.push_back(std::move(counts));
    }
    return model;
}

int predict_forest(const ForestModel& model, const std::vector<double>& x) {
    int votes = 0;
    for (const auto& tree : model.trees)
        votes += predict_tree(tree, x);
    return 2 * votes > static_cast<int>(model.trees.size()) ? 1 : 0;
}

double oob_error(const ForestModel& model, const StandardizedDesign& design) {
    if (model.inbag.size() != model.trees.size() || model.trees.empty())
        throw argument_error("oob_error: no in-bag bookkeeping (forest not fitted in-process)");
    const std::size_t n = design.n();
    std::size_t evaluated = 0, wrong = 0;
    std::vector<double> row(design.p());
    for (std::size_t i = 0; i < n; ++i) {
        int votes = 0, voters = 0;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            if (model.inbag[t].size() != n)
                throw argument_error("oob_error: design does not match the fitted rows");
            if (model.inbag[t][i] != 0)
                continue;
            if (voters == 0)
                for (std::size_t j = 0; j < design.p(); ++j)
                    row[j] = design.x(i, j);
            votes += predict_tree(model.trees[t], row);
            ++voters;
        }
        if (voters == 0)
            continue;
        ++evaluated;
        const int pred = 2 * votes > voters ? 1 : 0;
        wrong += pred != design.y[i];
    }
    if (evaluated == 0)
        throw argument_error("oob_error: no row was ever out of bag");
    return static_cast<double>(wrong) / static_cast<double>(evaluated);
}

} // namespace lungpipe
