#include "cstars/flow.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace cstars::flow {

std::vector<int32_t> hop_distances(const std::vector<std::vector<int32_t>>& adjacency,
                                   int32_t src) {
    std::vector<int32_t> dist(adjacency.size(), kUnreachable);
    std::deque<int32_t> queue;
    dist[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
        int32_t u = queue.front();
        queue.pop_front();
        for (int32_t v : adjacency[u]) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::vector<std::vector<int32_t>> all_pairs_distances(
    const std::vector<std::vector<int32_t>>& adjacency) {
    std::vector<std::vector<int32_t>> dist;
    dist.reserve(adjacency.size());
    for (size_t u = 0; u < adjacency.size(); ++u)
        dist.push_back(hop_distances(adjacency, static_cast<int32_t>(u)));
    return dist;
}

EcmpDag shortest_path_dag(const topo::TopologySnapshot& snap, uint32_t src, uint32_t dst) {
    auto adjacency = snap.adjacency();
    if (src >= adjacency.size() || dst >= adjacency.size())
        throw UnreachableError("node id out of range");

    EcmpDag dag;
    dag.src = src;
    dag.dst = dst;
    dag.succ.assign(adjacency.size(), {});

    if (src == dst) {
        dag.hop_distance = 0;
        dag.nodes = {static_cast<int32_t>(src)};
        return dag;
    }

    auto from_src = hop_distances(adjacency, static_cast<int32_t>(src));
    if (from_src[dst] == kUnreachable)
        throw UnreachableError("no path from " + std::to_string(src) + " to " +
                               std::to_string(dst));
    auto to_dst = hop_distances(adjacency, static_cast<int32_t>(dst));
    int32_t total = from_src[dst];
    dag.hop_distance = total;

    for (int32_t u = 0; u < static_cast<int32_t>(adjacency.size()); ++u) {
        if (from_src[u] == kUnreachable || to_dst[u] == kUnreachable) continue;
        if (from_src[u] + to_dst[u] != total) continue;
        dag.nodes.push_back(u);
        if (u == static_cast<int32_t>(dst)) continue;
        for (int32_t v : adjacency[u])
            if (to_dst[v] != kUnreachable && from_src[u] + 1 + to_dst[v] == total)
                dag.succ[u].push_back(v);  // adjacency is ascending already
    }
    return dag;
}

FlowSetResult flow_sets(const topo::TopologySnapshot& snap, uint64_t epoch) {
    auto adjacency = snap.adjacency();
    auto dist = all_pairs_distances(adjacency);
    int32_t n = static_cast<int32_t>(adjacency.size());

    FlowSetResult result;
    result.sets.resize(n);
    for (int32_t k = 0; k < n; ++k) {
        result.sets[k].sat_id = static_cast<uint32_t>(k);
        result.sets[k].epoch = epoch;
    }

    for (int32_t u = 0; u < n; ++u) {
        for (int32_t v = 0; v < n; ++v) {
            if (u == v) continue;
            int32_t d = dist[u][v];
            if (d == kUnreachable) {
                ++result.unreachable_pairs;
                continue;
            }
            FlowKey key{static_cast<uint32_t>(u), static_cast<uint32_t>(v)};
            for (int32_t k = 0; k < n; ++k)
                if (dist[u][k] != kUnreachable && dist[k][v] != kUnreachable &&
                    dist[u][k] + dist[k][v] == d)
                    result.sets[k].flows.push_back(key);
        }
    }
    /* The (u, v) scan already emits keys in (src, dst) order per satellite. */
    return result;
}

std::string format_flow_sets_csv(const std::vector<FlowSet>& sets) {
    std::ostringstream os;
    os << "sat_id,src,dst\n";
    for (const FlowSet& fs : sets)
        for (const FlowKey& f : fs.flows)
            os << fs.sat_id << ',' << f.src << ',' << f.dst << '\n';
    return os.str();
}

}  // namespace cstars::flow
