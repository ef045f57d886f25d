#include "lungpipe/subset.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include "csv_util.hpp"
#include "lungpipe/errors.hpp"

namespace lungpipe {

namespace {

// RSS of the least-squares fit on the masked columns plus intercept, from the
// precomputed Gram pieces of the full intercept-augmented design.
double subset_rss(const Matrix& gram, const std::vector<double>& xty, double yty,
                  const std::vector<std::size_t>& cols) {
    const std::size_t m = cols.size() + 1; // intercept first
    Matrix a(m, m);
    std::vector<double> b(m);
    std::vector<std::size_t> sel;
    sel.reserve(m);
    sel.push_back(0);
    for (std::size_t c : cols)
        sel.push_back(c + 1);
    for (std::size_t i = 0; i < m; ++i) {
        b[i] = xty[sel[i]];
        for (std::size_t j = 0; j < m; ++j)
            a(i, j) = gram(sel[i], sel[j]);
    }
    std::vector<double> beta;
    try {
        beta = solve_spd(a, b);
    } catch (const numeric_error&) {
        return std::numeric_limits<double>::infinity();
    }
    double rss = yty;
    for (std::size_t i = 0; i < m; ++i)
        rss -= beta[i] * b[i];
    return rss < 0 ? 0 : rss;
}

} // namespace

SubsetReport best_subsets(const StandardizedDesign& design) {
    const std::size_t n = design.n();
    const std::size_t p = design.p();
    if (p > 20)
        throw argument_error("best_subsets: p > 20 makes 2^p enumeration infeasible");
    if (n <= p + 1)
        throw argument_error("best_subsets: need n > p + 1 rows");

    // Gram of [1 | X] and its product with y, accumulated once.
    Matrix gram(p + 1, p + 1);
    std::vector<double> xty(p + 1, 0.0);
    double yty = 0, ysum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = design.y[i];
        yty += yi * yi;
        ysum += yi;
        xty[0] += yi;
        gram(0, 0) += 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double xij = design.x(i, j);
            xty[j + 1] += xij * yi;
            gram(0, j + 1) += xij;
            gram(j + 1, 0) += xij;
            for (std::size_t k = 0; k < p; ++k)
                gram(j + 1, k + 1) += xij * design.x(i, k);
        }
    }
    const double ybar = ysum / static_cast<double>(n);
    double tss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = design.y[i] - ybar;
        tss += d * d;
    }

    std::vector<double> best_rss(p + 1, std::numeric_limits<double>::infinity());
    std::vector<std::vector<std::size_t>> best_cols(p + 1);
    best_rss[0] = tss;

    for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
        const int k = std::popcount(mask);
        std::vector<std::size_t> cols;
        cols.reserve(static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < p; ++j)
            if (mask & (1u << j))
                cols.push_back(j);
        const double rss = subset_rss(gram, xty, yty, cols);
        if (rss < best_rss[static_cast<std::size_t>(k)]) {
            best_rss[static_cast<std::size_t>(k)] = rss;
            best_cols[static_cast<std::size_t>(k)] = std::move(cols);
        }
    }

    SubsetReport report;
    report.tss = tss;
    report.sigma2_full = best_rss[p] / static_cast<double>(n - p - 1);

    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k <= p; ++k) {
        SubsetEntry e;
        e.k = static_cast<int>(k);
        e.indices = best_cols[k];
        for (std::size_t c : e.indices)
            e.variables.push_back(design.feature_names[c]);
        e.rss = best_rss[k];
        const double kd = static_cast<double>(k);
        e.cp = (e.rss + 2.0 * kd * report.sigma2_full) / nd;
        e.bic = (e.rss + std::log(nd) * kd * report.sigma2_full) / nd;
        e.adj_r2 = 1.0 - (e.rss / (nd - kd - 1.0)) / (tss / (nd - 1.0));
        report.entries.push_back(std::move(e));
    }

    report.best_k_cp = 0;
    report.best_k_bic = 0;
    report.best_k_adj_r2 = 0;
    for (std::size_t k = 1; k <= p; ++k) {
        if (report.entries[k].cp < report.entries[report.best_k_cp].cp)
            report.best_k_cp = static_cast<int>(k);
        if (report.entries[k].bic < report.entries[report.best_k_bic].bic)
            report.best_k_bic = static_cast<int>(k);
        if (report.entries[k].adj_r2 > report.entries[report.best_k_adj_r2].adj_r2)
            report.best_k_adj_r2 = static_cast<int>(k);
    }
    return report;
}

void save_subset_csv(const SubsetReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << "k,variables,rss,cp,bic,adj_r2\n";
    for (const auto& e : report.entries) {
        out << e.k << ',';
        for (std::size_t i = 0; i < e.variables.size(); ++i) {
            if (i)
                out << '+';
            out << e.variables[i];
        }
        out << ',' << detail::format_double(e.rss) << ',' << detail::format_double(e.cp) << ','
            << detail::format_double(e.bic) << ',' << detail::format_double(e.adj_r2) << '\n';
    }
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

} // namespace lungpipe
