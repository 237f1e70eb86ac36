#ifndef CSTARS_HARNESS_HPP
#define CSTARS_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cstars/metrics.hpp"
#include "cstars/scenario.hpp"

namespace cstars::sim {

class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

/** A packet paused mid-path at a measurement boundary. */
struct InFlightPacket {
    flow::FlowKey flow;
    int32_t current_node = -1;
};

struct RerouteResult {
    std::vector<InFlightPacket> continuing;
    uint64_t dropped = 0;  // destination no longer reachable on the new snapshot
};

/** Carries in-flight packets across a topology change: packets whose
 *  destination is still reachable continue from their current node on the
 *  new snapshot, the rest are dropped and counted. */
RerouteResult reroute_on_change(const topo::TopologySnapshot& next,
                                std::vector<InFlightPacket> in_flight);

/** What to write where. With an empty out_dir the run is in-memory only. */
struct RunOptions {
    std::string out_dir;
    bool write_topology = true;
    bool write_adjacency_matrix = false;
    bool write_flow_sets = false;  // large; off unless asked
    bool write_seeds = true;
    bool write_truth = true;
    bool write_estimates = true;
};

struct RunResult {
    std::vector<metrics::MetricRow> rows;  // per-period rows, then run means (epoch -1)
    uint64_t generated_packets = 0;
    uint64_t delivered_packets = 0;
    uint64_t dropped_packets = 0;
    uint64_t total_hops = 0;
    uint64_t lost_readbacks = 0;
    uint64_t unreachable_pairs = 0;
    uint64_t distinct_flows = 0;       // network-wide, whole run
    double max_modulus_ratio = 0.0;    // max h/n over all non-sentinel tables
    double mean_modulus_ratio = 0.0;
    uint64_t max_modulus = 0;
    uint64_t scenario_digest = 0;
    double wall_seconds = 0.0;
};

/** Runs one scenario end to end: topology prediction, seed distribution,
 *  traffic, per-hop counting on every enabled scheme, per-period readback
 *  and evaluation. Deterministic for a fixed scenario. */
RunResult run(const Scenario& sc, const RunOptions& opt = {});

}  // namespace cstars::sim

#endif
