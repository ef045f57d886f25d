#include "lungpipe/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv_util.hpp"
#include "lungpipe/errors.hpp"

namespace lungpipe {

namespace {

std::vector<Region> label_impl(const BinaryMask& mask, const GrayImage* source) {
    if (source && (source->width != mask.width || source->height != mask.height))
        throw argument_error("label_components: image and mask dimensions differ");

    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> owner(mask.pixels.size(), -1);
    std::vector<Region> regions;
    std::vector<std::size_t> stack;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t start = static_cast<std::size_t>(r) * w + c;
            if (!mask.pixels[start] || owner[start] >= 0)
                continue;
            Region region;
            region.min_row = region.max_row = r;
            region.min_col = region.max_col = c;
            owner[start] = static_cast<std::int32_t>(regions.size());
            stack.assign(1, start);
            while (!stack.empty()) {
                const std::size_t idx = stack.back();
                stack.pop_back();
                const int pr = static_cast<int>(idx) / w;
                const int pc = static_cast<int>(idx) % w;
                region.pixels.emplace_back(pr, pc);
                if (source)
                    region.intensities.push_back(source->pixels[idx]);
                region.min_row = std::min(region.min_row, pr);
                region.max_row = std::max(region.max_row, pr);
                region.min_col = std::min(region.min_col, pc);
                region.max_col = std::max(region.max_col, pc);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0)
                            continue;
                        const int nr = pr + dr, nc = pc + dc;
                        if (nr < 0 || nr >= h || nc < 0 || nc >= w)
                            continue;
                        const std::size_t nidx = static_cast<std::size_t>(nr) * w + nc;
                        if (mask.pixels[nidx] && owner[nidx] < 0) {
                            owner[nidx] = static_cast<std::int32_t>(regions.size());
                            stack.push_back(nidx);
                        }
                    }
                }
            }
            regions.push_back(std::move(region));
        }
    }

    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
        if (a.min_row != b.min_row)
            return a.min_row < b.min_row;
        return a.min_col < b.min_col;
    });
    return regions;
}

} // namespace

std::vector<Region> label_components(const BinaryMask& mask) { return label_impl(mask, nullptr); }

std::vector<Region> label_components(const BinaryMask& mask, const GrayImage& source) {
    return label_impl(mask, &source);
}

std::size_t area(const Region& r) { return r.pixels.size(); }

std::size_t perimeter(const Region& r) {
    const int bw = r.max_col - r.min_col + 1;
    const int bh = r.max_row - r.min_row + 1;
    std::vector<std::uint8_t> local(static_cast<std::size_t>(bw) * bh, 0);
    for (const auto& [pr, pc] : r.pixels)
        local[static_cast<std::size_t>(pr - r.min_row) * bw + (pc - r.min_col)] = 1;

    auto filled = [&](int lr, int lc) {
        if (lr < 0 || lr >= bh || lc < 0 || lc >= bw)
            return false;
        return local[static_cast<std::size_t>(lr) * bw + lc] != 0;
    };

    std::size_t edges = 0;
    for (const auto& [pr, pc] : r.pixels) {
        const int lr = pr - r.min_row, lc = pc - r.min_col;
        edges += !filled(lr - 1, lc);
        edges += !filled(lr + 1, lc);
        edges += !filled(lr, lc - 1);
        edges += !filled(lr, lc + 1);
    }
    return edges;
}

IntensityStats intensity_stats(const Region& r) {
    if (r.intensities.empty())
        throw argument_error("intensity_stats: region carries no intensities");
    const double n = static_cast<double>(r.intensities.size());

    double sum = 0;
    for (std::uint16_t v : r.intensities)
        sum += v;
    const double mean = sum / n;

    double m2 = 0, m3 = 0, m4 = 0;
    for (std::uint16_t v : r.intensities) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    IntensityStats stats;
    stats.stddev = std::sqrt(m2);
    if (m2 > 0) {
        stats.skewness = m3 / (m2 * stats.stddev);
        stats.kurtosis = m4 / (m2 * m2);
    }
    return stats;
}

double entropy(const Region& r, int bins) {
    if (bins < 1 || bins > 65536)
        throw argument_error("entropy: bins out of range [1, 65536]");
    if (r.intensities.empty())
        throw argument_error("entropy: region carries no intensities");

    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (std::uint16_t v : r.intensities) {
        const std::size_t idx = static_cast<std::size_t>(v) * bins / 65536;
        ++counts[idx];
    }
    const double n = static_cast<double>(r.intensities.size());
    double h = 0;
    for (std::size_t count : counts) {
        if (count == 0)
            continue;
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double eccentricity(const Region& r) {
    if (r.pixels.empty())
        throw argument_error("eccentricity: empty region");
    const double n = static_cast<double>(r.pixels.size());
    double mr = 0, mc = 0;
    for (const auto& [pr, pc] : r.pixels) {
        mr += pr;
        mc += pc;
    }
    mr /= n;
    mc /= n;
    double srr = 0, scc = 0, src = 0;
    for (const auto& [pr, pc] : r.pixels) {
        const double dr = pr - mr, dc = pc - mc;
        srr += dr * dr;
        scc += dc * dc;
        src += dr * dc;
    }
    srr /= n;
    scc /= n;
    src /= n;

    // eigenvalues of the coordinate covariance
    const double tr = srr + scc;
    const double disc = std::sqrt(std::max(0.0, (srr - scc) * (srr - scc) + 4 * src * src));
    const double l1 = (tr + disc) / 2;
    const double l2 = (tr - disc) / 2;
    if (l1 <= 0)
        return 0;
    return std::sqrt(std::max(0.0, 1.0 - l2 / l1));
}

FeatureRecord extract_features(const GrayImage& img, const BinaryMask& mask, const std::string& id,
                               int entropy_bins) {
    auto regions = label_components(mask, img);
    if (regions.empty())
        throw argument_error("extract_features: mask has no foreground pixels");
    const Region* best = &regions[0];
    for (const auto& region : regions)
        if (region.area() > best->area())
            best = &region;

    FeatureRecord rec;
    rec.id = id;
    rec.area = static_cast<double>(area(*best));
    rec.perimeter = static_cast<double>(perimeter(*best));
    const IntensityStats stats = intensity_stats(*best);
    rec.stddev = stats.stddev;
    rec.skewness = stats.skewness;
    rec.kurtosis = stats.kurtosis;
    rec.entropy = entropy(*best, entropy_bins);
    return rec;
}

bool FeatureTable::has_labels() const { return !records.empty() && records[0].label.has_value(); }

void FeatureTable::validate() const {
    for (const auto& rec : records)
        if (rec.label.has_value() != has_labels())
            throw format_error("feature table: labels must be present on all rows or none");
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string("nan");
}

} // namespace

void save_feature_csv(const FeatureTable& table, const std::string& path) {
    table.validate();
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << "id,area,perimeter,stddev,skewness,kurtosis,entropy";
    if (table.has_labels())
        out << ",label";
    out << '\n';
    for (const auto& rec : table.records) {
        out << rec.id << ',' << detail::format_double(rec.area) << ','
            << detail::format_double(rec.perimeter) << ',' << detail::format_double(rec.stddev)
            << ',' << fmt_opt(rec.skewness) << ',' << fmt_opt(rec.kurtosis) << ','
            << detail::format_double(rec.entropy);
        if (table.has_labels())
            out << ',' << *rec.label;
        out << '\n';
    }
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

FeatureTable load_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw format_error("feature csv '" + path + "' is empty");
    const auto header = detail::split_csv_line(line);
    const std::vector<std::string> base = {"id",       "area",     "perimeter", "stddev",
                                           "skewness", "kurtosis", "entropy"};
    bool labeled = false;
    if (header.size() == base.size() + 1 && header.back() == "label")
        labeled = true;
    else if (header.size() != base.size())
        throw format_error("feature csv '" + path + "': unexpected header");
    for (std::size_t i = 0; i < base.size(); ++i)
        if (header[i] != base[i])
            throw format_error("feature csv '" + path + "': unexpected header column '" +
                               header[i] + "'");

    FeatureTable table;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != base.size() + (labeled ? 1 : 0))
            throw format_error("feature csv '" + path + "': malformed row '" + line + "'");
        const std::string ctx = "feature csv '" + path + "'";
        FeatureRecord rec;
        rec.id = fields[0];
        rec.area = detail::parse_double_field(fields[1], ctx);
        rec.perimeter = detail::parse_double_field(fields[2], ctx);
        rec.stddev = detail::parse_double_field(fields[3], ctx);
        if (fields[4] != "nan")
            rec.skewness = detail::parse_double_field(fields[4], ctx);
        if (fields[5] != "nan")
            rec.kurtosis = detail::parse_double_field(fields[5], ctx);
        rec.entropy = detail::parse_double_field(fields[6], ctx);
        if (labeled) {
            const double lv = detail::parse_double_field(fields[7], ctx);
            if (lv != 0 && lv != 1)
                throw format_error(ctx + ": label must be 0 or 1");
            rec.label = static_cast<int>(lv);
        }
        table.records.push_back(std::move(rec));
    }
    table.validate();
    return table;
}

} // namespace lungpipe
