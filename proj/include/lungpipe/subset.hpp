#pragma once

#include <string>
#include <vector>

#include "lungpipe/dataset.hpp"

namespace lungpipe {

/// Best subset of each size k, with the size-selection criteria.
struct SubsetEntry {
    int k = 0;
    std::vector<std::size_t> indices; // columns of the design, ascending
    std::vector<std::string> variables;
    double rss = 0;
    double cp = 0;
    double bic = 0;
    double adj_r2 = 0;
};

struct SubsetReport {
    std::vector<SubsetEntry> entries; // one per k = 0..p
    double tss = 0;
    double sigma2_full = 0; // RSS_full / (n - p - 1)
    int best_k_cp = 0;
    int best_k_bic = 0;
    int best_k_adj_r2 = 0;
};

/// Exhaustive best-subset linear regression of the binary response on every
/// predictor subset. For each k the subset minimizing RSS is kept, then
/// Cp = (RSS + 2k sigma^2)/n, BIC = (RSS + ln(n) k sigma^2)/n and adjusted
/// R^2 = 1 - (RSS/(n-k-1))/(TSS/(n-1)) are evaluated on the per-k winners.
SubsetReport best_subsets(const StandardizedDesign& design);

/// CSV `k,variables,rss,cp,bic,adj_r2`; variables joined with '+'.
void save_subset_csv(const SubsetReport& report, const std::string& path);

} // namespace lungpipe
