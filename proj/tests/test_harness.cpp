#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstars/harness.hpp"
#include "cstars/io.hpp"
#include "cstars/metrics.hpp"
#include "cstars/topology.hpp"
#include "doctest.h"

using namespace cstars;
using namespace cstars::sim;
namespace fs = std::filesystem;

namespace {

/* Six-plane star shell, light traffic, three two-epoch measurement
 * periods. Small enough that one full run stays well under a second. */
const char* kSmall = R"({
  "name": "smallrun",
  "constellation": {"planes": 6, "sats_per_plane": 11, "altitude_km": 781.0,
                    "inclination_deg": 86.4, "phasing": 2, "raan_spread_deg": 180.0},
  "isl": {"max_terminals": 4, "seam_enabled": true, "high_latitude_cutoff_deg": 70.0},
  "traffic": {"offerload": 0.1, "isl_bandwidth_units": 200.0, "stations": 16},
  "epoch_s": 1.0, "horizon_s": 6.0, "seed_period_s": 2.0, "rng_seed": 77,
  "schemes": ["cs", "cm", "es", "fl"],
  "memory_bytes": {"cs": 8192, "cm": 8192, "es": 8192, "fl": 8192}
})";

Scenario small_scenario() { return scenario_from_json_text(kSmall); }

Scenario small_with(const std::function<void(nlohmann::json&)>& tweak) {
    nlohmann::json j = nlohmann::json::parse(kSmall);
    tweak(j);
    return scenario_from_json_text(j.dump());
}

/* Undirected path 0-1-...-(n-1); enough structure for reroute decisions. */
topo::TopologySnapshot line_snapshot(int32_t n) {
    topo::TopologySnapshot snap;
    snap.node_count = n;
    for (int32_t i = 0; i + 1 < n; ++i)
        snap.links.push_back({i, i + 1, topo::LinkKind::intra_plane});
    return snap;
}

bool rows_equal(const metrics::MetricRow& a, const metrics::MetricRow& b) {
    return a.scenario == b.scenario && a.scheme == b.scheme && a.load == b.load &&
           a.memory_bytes == b.memory_bytes && a.epoch == b.epoch && a.are == b.are &&
           a.wmre == b.wmre && a.re == b.re && a.saturations == b.saturations &&
           a.false_positives == b.false_positives && a.prediction_misses == b.prediction_misses;
}

const metrics::MetricRow& row_of(const std::vector<metrics::MetricRow>& rows,
                                 const std::string& scheme, int64_t epoch) {
    for (const auto& r : rows)
        if (r.scheme == scheme && r.epoch == epoch) return r;
    FAIL("no row for ", scheme, " at epoch ", epoch);
    static metrics::MetricRow dummy;
    return dummy;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("reroute keeps reachable packets and drops the rest") {
    auto snap = line_snapshot(4);

    SUBCASE("empty input") {
        auto rr = sim::reroute_on_change(snap, {});
        CHECK(rr.continuing.empty());
        CHECK(rr.dropped == 0);
    }

    SUBCASE("connected line keeps everything, in order") {
        std::vector<sim::InFlightPacket> fleet = {
            {{0, 3}, 1}, {{2, 0}, 2}, {{0, 3}, 0}, {{1, 3}, 3}};
        auto rr = sim::reroute_on_change(snap, fleet);
        CHECK(rr.dropped == 0);
        REQUIRE(rr.continuing.size() == 4);
        for (size_t i = 0; i < fleet.size(); ++i) {
            CHECK(rr.continuing[i].flow.src == fleet[i].flow.src);
            CHECK(rr.continuing[i].flow.dst == fleet[i].flow.dst);
            CHECK(rr.continuing[i].current_node == fleet[i].current_node);
        }
    }

    SUBCASE("partition drops only the stranded side") {
        topo::TopologySnapshot split;
        split.node_count = 4;
        split.links.push_back({0, 1, topo::LinkKind::intra_plane});
        split.links.push_back({2, 3, topo::LinkKind::intra_plane});

        std::vector<sim::InFlightPacket> fleet = {
            {{0, 3}, 1},  // dst 3 unreachable from node 1
            {{0, 1}, 0},  // stays inside the left island
            {{1, 3}, 2},  // already on the right island
            {{2, 3}, 3},  // sitting at its destination
        };
        auto rr = sim::reroute_on_change(split, fleet);
        CHECK(rr.dropped == 1);
        REQUIRE(rr.continuing.size() == 3);
        CHECK(rr.continuing[0].current_node == 0);
        CHECK(rr.continuing[1].current_node == 2);
        CHECK(rr.continuing[2].current_node == 3);
    }

    SUBCASE("nodes outside the snapshot drop") {
        std::vector<sim::InFlightPacket> fleet = {{{0, 3}, -1}, {{0, 3}, 7}, {{0, 3}, 2}};
        auto rr = sim::reroute_on_change(snap, fleet);
        CHECK(rr.dropped == 2);
        REQUIRE(rr.continuing.size() == 1);
        CHECK(rr.continuing[0].current_node == 2);
    }
}

TEST_CASE("two runs of one scenario agree bit for bit") {
    auto sc = small_scenario();
    auto a = sim::run(sc);
    auto b = sim::run(sc);

    CHECK(a.scenario_digest == scenario_hash(sc));
    CHECK(a.scenario_digest == b.scenario_digest);
    CHECK(a.generated_packets == b.generated_packets);
    CHECK(a.delivered_packets == b.delivered_packets);
    CHECK(a.dropped_packets == b.dropped_packets);
    CHECK(a.total_hops == b.total_hops);
    CHECK(a.lost_readbacks == b.lost_readbacks);
    CHECK(a.unreachable_pairs == b.unreachable_pairs);
    CHECK(a.distinct_flows == b.distinct_flows);
    CHECK(a.max_modulus == b.max_modulus);
    CHECK(a.max_modulus_ratio == b.max_modulus_ratio);
    CHECK(a.mean_modulus_ratio == b.mean_modulus_ratio);

    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) CHECK(rows_equal(a.rows[i], b.rows[i]));

    /* The formatted report is the published artifact; it must match too. */
    CHECK(metrics::format_report_csv(a.rows) == metrics::format_report_csv(b.rows));
}

TEST_CASE("packet and row accounting") {
    auto sc = small_scenario();
    auto r = sim::run(sc);

    CHECK(r.generated_packets > 0);
    /* Hop caps are off, so every packet either arrives or hits a partition. */
    CHECK(r.generated_packets == r.delivered_packets + r.dropped_packets);
    CHECK(r.delivered_packets > 0);
    /* Stations never share a satellite with their peer here, so every
     * delivered packet crossed at least one link. */
    CHECK(r.total_hops >= r.delivered_packets);
    CHECK(r.distinct_flows > 0);
    CHECK(r.unreachable_pairs == 0);

    /* Seed tables exist for every period; a perfect modulus is never
     * smaller than the set it separates. */
    CHECK(r.max_modulus > 0);
    CHECK(r.max_modulus_ratio >= 1.0);
    CHECK(r.mean_modulus_ratio >= 1.0);
    CHECK(r.mean_modulus_ratio <= r.max_modulus_ratio);

    /* Three two-epoch periods plus one run-mean row per scheme. */
    REQUIRE(r.rows.size() == 4 * 4);
    for (const auto& s : {"cs", "cm", "es", "fl"}) {
        std::vector<double> ares;
        for (int64_t e : {0, 2, 4}) ares.push_back(row_of(r.rows, s, e).are);
        const auto& mean = row_of(r.rows, s, -1);
        double expect = (ares[0] + ares[1] + ares[2]) / 3.0;
        CHECK(mean.are == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("fresh seeds and ample slots make on-board counts exact") {
    /* Seeds refreshed every epoch and a slot budget far above any modulus:
     * no collisions, no stale predictions, so readback equals truth. */
    auto sc = small_with([](nlohmann::json& j) {
        j["seed_period_s"] = 1.0;
        j["horizon_s"] = 3.0;
        j["memory_bytes"]["cs"] = 1 << 20;
    });
    auto r = sim::run(sc);

    for (int64_t e : {0, 1, 2, -1}) {
        const auto& row = row_of(r.rows, "cs", e);
        CHECK(row.are == 0.0);
        CHECK(row.wmre == 0.0);
        CHECK(row.re == 0.0);
        CHECK(row.false_positives == 0);
        CHECK(row.saturations == 0);
        CHECK(row.prediction_misses == 0);
    }
}

TEST_CASE("lost readbacks re-read the retained buffer") {
    auto clean = sim::run(small_scenario());
    CHECK(clean.lost_readbacks == 0);

    auto lossy_sc = small_with([](nlohmann::json& j) { j["control_loss_rate"] = 0.5; });
    auto lossy = sim::run(lossy_sc);

    /* 66 nodes times three collection boundaries at even odds. */
    CHECK(lossy.lost_readbacks > 0);
    CHECK(lossy.lost_readbacks < 3 * 66);

    /* Loss touches only the control channel, never forwarding. */
    CHECK(lossy.generated_packets == clean.generated_packets);
    CHECK(lossy.delivered_packets == clean.delivered_packets);
    CHECK(lossy.dropped_packets == clean.dropped_packets);
    CHECK(lossy.total_hops == clean.total_hops);

    /* A boundary that installs the next seed table retains the snapshot it
     * just returned, so re-reading it is lossless for those periods. */
    for (int64_t e : {0, 2})
        CHECK(rows_equal(row_of(lossy.rows, "cs", e), row_of(clean.rows, "cs", e)));

    /* Ground-side baselines never ride the control channel. */
    for (const auto& s : {"cm", "es", "fl"})
        for (int64_t e : {0, 2, 4, -1})
            CHECK(rows_equal(row_of(lossy.rows, s, e), row_of(clean.rows, s, e)));
}

TEST_CASE("zero offered load still produces a full report") {
    auto sc = small_with([](nlohmann::json& j) { j["traffic"]["offerload"] = 0.0; });
    auto r = sim::run(sc);

    CHECK(r.generated_packets == 0);
    CHECK(r.delivered_packets == 0);
    CHECK(r.dropped_packets == 0);
    CHECK(r.total_hops == 0);
    CHECK(r.distinct_flows == 0);
    /* Prediction and seeding run off topology alone. */
    CHECK(r.max_modulus > 0);

    REQUIRE(r.rows.size() == 4 * 4);
    for (const auto& row : r.rows) {
        CHECK(row.are == 0.0);
        CHECK(row.wmre == 0.0);
        CHECK(row.re == 0.0);
        CHECK(row.false_positives == 0);
        CHECK(row.prediction_misses == 0);
    }
}

TEST_CASE("run rejects a scenario that fails validation") {
    auto sc = small_scenario();
    sc.traffic.offerload = -0.5;
    CHECK_THROWS_WITH_AS(sim::run(sc), doctest::Contains("scenario fails validation"),
                         ConfigError);

    auto tiny = small_scenario();
    tiny.memory_bytes["cs"] = 4;  // nonzero, but below one 8-byte slot
    CHECK_THROWS_AS(sim::run(tiny), ConfigError);
}

TEST_CASE("a latitude cutoff that strands planes shows up as unreachable pairs") {
    auto sc = small_with([](nlohmann::json& j) {
        j["isl"]["high_latitude_cutoff_deg"] = 0.5;
        j["horizon_s"] = 2.0;
    });
    auto r = sim::run(sc);
    CHECK(r.unreachable_pairs > 0);
    CHECK(r.generated_packets == r.delivered_packets + r.dropped_packets);
    CHECK(r.dropped_packets > 0);  // cross-plane demand exists on stranded rings
}

TEST_CASE("hop caps pause packets instead of teleporting them") {
    auto capped_sc = small_with([](nlohmann::json& j) { j["max_hops_per_epoch"] = 2; });
    auto capped = sim::run(capped_sc);
    auto free_run = sim::run(small_scenario());

    CHECK(capped.generated_packets == free_run.generated_packets);
    /* Paused packets may still be in flight when the horizon ends. */
    CHECK(capped.delivered_packets + capped.dropped_packets <= capped.generated_packets);
    CHECK(capped.delivered_packets > 0);

    /* Same offered traffic, so a capped run never walks more hops than the
     * packets it actually moved could use. */
    CHECK(capped.total_hops <= free_run.total_hops);

    auto again = sim::run(capped_sc);
    CHECK(again.delivered_packets == capped.delivered_packets);
    CHECK(again.total_hops == capped.total_hops);
}

TEST_CASE("output directory holds the full artifact set") {
    TempDir dir("cstars_harness_out");
    sim::RunOptions opt;
    opt.out_dir = dir.path.string();

    auto sc = small_scenario();
    auto r = sim::run(sc, opt);

    for (const char* rel :
         {"manifest.json", "scenario.json", "report.csv", "seeds/epoch_0.csv",
          "seeds/epoch_2.csv", "seeds/epoch_4.csv", "truth/epoch_0.csv", "truth/epoch_2.csv",
          "truth/epoch_4.csv", "estimates/epoch_0.csv", "estimates/readback_0.csv",
          "topology/epoch_0.adjlist", "topology/epoch_5.adjlist"})
        CHECK_MESSAGE(fs::exists(dir.path / rel), rel);
    CHECK_FALSE(fs::exists(dir.path / "flows"));
    CHECK_FALSE(fs::exists(dir.path / "topology/epoch_0.matrix.csv"));

    auto manifest = nlohmann::json::parse(io::read_file((dir.path / "manifest.json").string()));
    CHECK(manifest["complete"] == true);
    CHECK(manifest["scenario_hash"].get<uint64_t>() == r.scenario_digest);
    CHECK(manifest["generated_packets"].get<uint64_t>() == r.generated_packets);
    auto outputs = manifest["outputs"].get<std::vector<std::string>>();
    CHECK(std::is_sorted(outputs.begin(), outputs.end()));
    CHECK(std::find(outputs.begin(), outputs.end(), "report.csv") != outputs.end());
    for (const auto& rel : outputs) CHECK(fs::exists(dir.path / rel));

    /* The stored scenario round-trips to the digest the run reported. */
    auto stored = scenario_from_json_text(io::read_file((dir.path / "scenario.json").string()));
    CHECK(scenario_hash(stored) == r.scenario_digest);

    /* The stored report is the in-memory rows, byte for byte. */
    std::string report = io::read_file((dir.path / "report.csv").string());
    CHECK(report == metrics::format_report_csv(r.rows));
    auto parsed = metrics::parse_report_csv(report);
    REQUIRE(parsed.size() == r.rows.size());
    for (size_t i = 0; i < parsed.size(); ++i) CHECK(parsed[i].scheme == r.rows[i].scheme);

    /* Every hop lands in exactly one truth atom, so the truth files sum
     * back to the hop count. */
    uint64_t truth_sum = 0;
    for (int e : {0, 2, 4}) {
        std::istringstream in(io::read_file((dir.path / ("truth/epoch_" + std::to_string(e) +
                                                         ".csv")).string()));
        std::string line;
        std::getline(in, line);  // header
        CHECK(line == "epoch,sat_id,src,dst,port,units");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            truth_sum += std::stoull(line.substr(line.rfind(',') + 1));
        }
    }
    CHECK(truth_sum == r.total_hops);
}

TEST_CASE("topology output can be switched off") {
    TempDir dir("cstars_harness_quiet");
    sim::RunOptions opt;
    opt.out_dir = dir.path.string();
    opt.write_topology = false;
    opt.write_truth = false;
    opt.write_estimates = false;

    auto sc = small_with([](nlohmann::json& j) { j["horizon_s"] = 2.0; });
    sim::run(sc, opt);

    CHECK_FALSE(fs::exists(dir.path / "topology"));
    CHECK_FALSE(fs::exists(dir.path / "truth"));
    CHECK_FALSE(fs::exists(dir.path / "estimates"));
    CHECK(fs::exists(dir.path / "report.csv"));
    CHECK(fs::exists(dir.path / "seeds/epoch_0.csv"));
}

}  // TEST_SUITE
