#ifndef CSTARS_FLOW_HPP
#define CSTARS_FLOW_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/topology.hpp"

namespace cstars::flow {

/** A flow is an ordered (ingress satellite, egress satellite) pair. */
struct FlowKey {
    uint32_t src = 0;
    uint32_t dst = 0;

    bool operator==(const FlowKey& o) const { return src == o.src && dst == o.dst; }
    bool operator<(const FlowKey& o) const { return src != o.src ? src < o.src : dst < o.dst; }
};

constexpr int32_t kUnreachable = std::numeric_limits<int32_t>::max();

class UnreachableError : public std::runtime_error {
public:
    explicit UnreachableError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Union of all minimum-hop paths from src to dst. succ[u] lists the
 *  admissible next hops of u in ascending node id; every path through the
 *  DAG from src reaches dst in exactly hop_distance hops. */
struct EcmpDag {
    uint32_t src = 0;
    uint32_t dst = 0;
    int32_t hop_distance = 0;
    std::vector<int32_t> nodes;  // every node on some minimum-hop path, ascending
    std::vector<std::vector<int32_t>> succ;
};

/** Hop counts from src to every node; kUnreachable where no path exists.
 *  Neighbor expansion in ascending node id keeps results deterministic. */
std::vector<int32_t> hop_distances(const std::vector<std::vector<int32_t>>& adjacency,
                                   int32_t src);

/** All-pairs hop counts. dist[u][v] symmetric on an undirected graph. */
std::vector<std::vector<int32_t>> all_pairs_distances(
    const std::vector<std::vector<int32_t>>& adjacency);

/** Builds the minimum-hop DAG for one ordered pair. Throws UnreachableError
 *  when dst cannot be reached. src == dst yields an empty zero-hop DAG. */
EcmpDag shortest_path_dag(const topo::TopologySnapshot& snap, uint32_t src, uint32_t dst);

/** The flows a satellite can observe in one snapshot: every ordered pair
 *  whose minimum-hop DAG passes through it. Endpoints count as on-path. */
struct FlowSet {
    uint32_t sat_id = 0;
    uint64_t epoch = 0;
    std::vector<FlowKey> flows;  // sorted by (src, dst)
};

struct FlowSetResult {
    std::vector<FlowSet> sets;  // one per satellite, indexed by sat id
    uint64_t unreachable_pairs = 0;
};

/** Flow sets for every satellite of the snapshot. Ordered pairs with no
 *  path are skipped and counted, not errors: traffic between them cannot
 *  transit anyway. */
FlowSetResult flow_sets(const topo::TopologySnapshot& snap, uint64_t epoch);

/** CSV dump for audit: header plus one "sat_id,src,dst" row per entry. */
std::string format_flow_sets_csv(const std::vector<FlowSet>& sets);

}  // namespace cstars::flow

#endif
