#include "cstars/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cstars::metrics {

double relative_error(double truth, double estimate) {
    if (truth == 0.0) throw ZeroTruthError("relative error of a zero aggregate is undefined");
    return std::abs(truth - estimate) / std::abs(truth);
}

namespace {

struct Accum {
    double load = 0.0;
    std::vector<double> are, wmre, re;
};

void mean_stdev(const std::vector<double>& xs, double& mean, double& stdev) {
    mean = 0.0;
    stdev = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    stdev = std::sqrt(var / double(xs.size()));
}

/* Fixed float formatting so reports are byte-stable across runs. */
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::vector<SweepCell> sweep_aggregate(const std::vector<MetricRow>& rows,
                                       const std::vector<std::pair<std::string, uint64_t>>& grid) {
    std::map<std::pair<std::string, uint64_t>, Accum> cells;
    for (const MetricRow& r : rows) {
        if (r.epoch < 0) continue;  // run-mean rows would double-count
        Accum& a = cells[{r.scheme, r.memory_bytes}];
        a.load = r.load;
        a.are.push_back(r.are);
        a.wmre.push_back(r.wmre);
        a.re.push_back(r.re);
    }

    std::vector<SweepCell> out;
    for (const auto& want : grid) {
        auto it = cells.find(want);
        if (it == cells.end() || it->second.are.empty())
            throw MissingGridPointError("no rows for scheme " + want.first + " at " +
                                        std::to_string(want.second) + " bytes");
        SweepCell c;
        c.scheme = want.first;
        c.memory_bytes = want.second;
        c.load = it->second.load;
        c.rows = it->second.are.size();
        mean_stdev(it->second.are, c.are_mean, c.are_stdev);
        mean_stdev(it->second.wmre, c.wmre_mean, c.wmre_stdev);
        mean_stdev(it->second.re, c.re_mean, c.re_stdev);
        out.push_back(c);
    }
    return out;
}

std::string format_report_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream os;
    os << "scenario,scheme,load,memory_bytes,epoch,are,wmre,re,saturations,false_positives,"
          "prediction_misses\n";
    for (const MetricRow& r : rows)
        os << r.scenario << ',' << r.scheme << ',' << fmt(r.load) << ',' << r.memory_bytes << ','
           << r.epoch << ',' << fmt(r.are) << ',' << fmt(r.wmre) << ',' << fmt(r.re) << ','
           << r.saturations << ',' << r.false_positives << ',' << r.prediction_misses << '\n';
    return os.str();
}

std::vector<MetricRow> parse_report_csv(const std::string& text) {
    std::vector<MetricRow> rows;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("scenario,", 0) == 0) continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 11) throw std::invalid_argument("report row needs 11 fields: " + line);
        MetricRow r;
        r.scenario = f[0];
        r.scheme = f[1];
        r.load = std::stod(f[2]);
        r.memory_bytes = std::stoull(f[3]);
        r.epoch = std::stoll(f[4]);
        r.are = std::stod(f[5]);
        r.wmre = std::stod(f[6]);
        r.re = std::stod(f[7]);
        r.saturations = std::stoull(f[8]);
        r.false_positives = std::stoull(f[9]);
        r.prediction_misses = std::stoull(f[10]);
        rows.push_back(r);
    }
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream os;
    os << "scheme,memory_bytes,load,rows,are_mean,are_stdev,wmre_mean,wmre_stdev,re_mean,"
          "re_stdev\n";
    for (const SweepCell& c : cells)
        os << c.scheme << ',' << c.memory_bytes << ',' << fmt(c.load) << ',' << c.rows << ','
           << fmt(c.are_mean) << ',' << fmt(c.are_stdev) << ',' << fmt(c.wmre_mean) << ','
           << fmt(c.wmre_stdev) << ',' << fmt(c.re_mean) << ',' << fmt(c.re_stdev) << '\n';
    return os.str();
}

}  // namespace cstars::metrics
