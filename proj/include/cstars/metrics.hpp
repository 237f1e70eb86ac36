#ifndef CSTARS_METRICS_HPP
#define CSTARS_METRICS_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cstars::metrics {

class EmptyTruthError : public std::runtime_error {
public:
    explicit EmptyTruthError(const std::string& msg) : std::runtime_error(msg) {}
};

class ZeroTruthError : public std::runtime_error {
public:
    explicit ZeroTruthError(const std::string& msg) : std::runtime_error(msg) {}
};

class MissingGridPointError : public std::runtime_error {
public:
    explicit MissingGridPointError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Average relative error over the truth's support: mean of |f - f_hat|/f
 *  for every key with positive truth. Keys absent from the estimate count
 *  as zero estimates. Keys with zero or absent truth are ignored here; the
 *  caller tallies them as false positives when estimated nonzero. */
template <typename K>
double average_relative_error(const std::map<K, uint64_t>& truth,
                              const std::map<K, uint64_t>& estimate) {
    double sum = 0.0;
    uint64_t n = 0;
    for (const auto& [key, f] : truth) {
        if (f == 0) continue;
        auto it = estimate.find(key);
        uint64_t fh = it == estimate.end() ? 0 : it->second;
        double diff = fh >= f ? double(fh - f) : double(f - fh);
        sum += diff / double(f);
        ++n;
    }
    if (n == 0) throw EmptyTruthError("relative error needs at least one positive truth entry");
    return sum / double(n);
}

/** Weighted mean relative error between flow-size histograms: with n_i the
 *  number of flows of size i in the truth and n̂_i in the estimate,
 *  sum |n_i - n̂_i| / sum (n_i + n̂_i)/2. Zero-size entries are not flows
 *  and never enter a histogram, so the value lives in [0, 2] and disjoint
 *  histograms score exactly 2. */
template <typename K>
double weighted_mean_relative_error(const std::map<K, uint64_t>& truth,
                                    const std::map<K, uint64_t>& estimate) {
    std::map<uint64_t, uint64_t> hist_t, hist_e;
    for (const auto& [key, f] : truth)
        if (f > 0) hist_t[f] += 1;
    for (const auto& [key, f] : estimate)
        if (f > 0) hist_e[f] += 1;
    if (hist_t.empty() && hist_e.empty())
        throw EmptyTruthError("histogram error needs at least one flow");

    double num = 0.0, den = 0.0;
    auto sizes = hist_t;
    for (const auto& [size, cnt] : hist_e) sizes.try_emplace(size, 0);
    for (const auto& [size, unused] : sizes) {
        auto t = hist_t.find(size);
        auto e = hist_e.find(size);
        double nt = t == hist_t.end() ? 0.0 : double(t->second);
        double ne = e == hist_e.end() ? 0.0 : double(e->second);
        num += std::abs(nt - ne);
        den += (nt + ne) / 2.0;
    }
    return num / den;
}

/** Relative error of a scalar aggregate, |truth - estimate| / truth. */
double relative_error(double truth, double estimate);

/** One evaluated epoch of one scheme at one grid cell. */
struct MetricRow {
    std::string scenario;
    std::string scheme;
    double load = 0.0;
    uint64_t memory_bytes = 0;
    int64_t epoch = 0;
    double are = 0.0;
    double wmre = 0.0;
    double re = 0.0;
    uint64_t saturations = 0;
    uint64_t false_positives = 0;
    uint64_t prediction_misses = 0;
};

/** Mean and spread per (scheme, memory) cell over every row that landed
 *  there, across epochs and runs. */
struct SweepCell {
    std::string scheme;
    uint64_t memory_bytes = 0;
    double load = 0.0;
    uint64_t rows = 0;
    double are_mean = 0.0, are_stdev = 0.0;
    double wmre_mean = 0.0, wmre_stdev = 0.0;
    double re_mean = 0.0, re_stdev = 0.0;
};

/** Aggregates rows over a required (scheme, memory) grid; a grid cell with
 *  no rows raises MissingGridPointError. Population standard deviation. */
std::vector<SweepCell> sweep_aggregate(
    const std::vector<MetricRow>& rows,
    const std::vector<std::pair<std::string, uint64_t>>& grid);

std::string format_report_csv(const std::vector<MetricRow>& rows);

/** Inverse of format_report_csv; tolerates a missing trailing newline.
 *  Malformed rows raise std::invalid_argument. */
std::vector<MetricRow> parse_report_csv(const std::string& text);

std::string format_sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace cstars::metrics

#endif
