#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "cstars/common.hpp"
#include "cstars/flow.hpp"
#include "cstars/topology.hpp"
#include "doctest.h"

using namespace cstars;

namespace {

topo::TopologySnapshot make_snap(int n, const std::vector<std::pair<int, int>>& edges) {
    topo::TopologySnapshot s;
    s.node_count = n;
    for (auto [a, b] : edges) {
        topo::Link l;
        l.a = std::min(a, b);
        l.b = std::max(a, b);
        s.links.push_back(l);
    }
    std::sort(s.links.begin(), s.links.end());
    return s;
}

/* Every simple path from the tail of cur to dst, exhaustive DFS. */
void all_simple_paths(const std::vector<std::vector<int32_t>>& adj, int32_t dst,
                      std::vector<int32_t>& cur, std::vector<char>& used,
                      std::vector<std::vector<int32_t>>& out) {
    int32_t u = cur.back();
    if (u == dst) {
        out.push_back(cur);
        return;
    }
    for (int32_t v : adj[u]) {
        if (used[v]) continue;
        used[v] = 1;
        cur.push_back(v);
        all_simple_paths(adj, dst, cur, used, out);
        cur.pop_back();
        used[v] = 0;
    }
}

/* Oracle: enumerate every simple path, keep the shortest ones, and derive
 * the node set and edge set the min-hop DAG must equal. */
void check_dag_against_enumeration(const topo::TopologySnapshot& snap, uint32_t src,
                                   uint32_t dst) {
    auto adj = snap.adjacency();
    std::vector<std::vector<int32_t>> paths;
    std::vector<int32_t> cur{static_cast<int32_t>(src)};
    std::vector<char> used(static_cast<size_t>(snap.node_count), 0);
    used[src] = 1;
    all_simple_paths(adj, static_cast<int32_t>(dst), cur, used, paths);

    if (paths.empty()) {
        CHECK_THROWS_AS((void)flow::shortest_path_dag(snap, src, dst), flow::UnreachableError);
        return;
    }
    size_t min_len = SIZE_MAX;
    for (const auto& p : paths) min_len = std::min(min_len, p.size());
    std::set<int32_t> nodes;
    std::set<std::pair<int32_t, int32_t>> edges;
    for (const auto& p : paths) {
        if (p.size() != min_len) continue;
        for (auto v : p) nodes.insert(v);
        for (size_t i = 0; i + 1 < p.size(); ++i) edges.insert({p[i], p[i + 1]});
    }

    auto dag = flow::shortest_path_dag(snap, src, dst);
    CHECK(dag.hop_distance == static_cast<int32_t>(min_len) - 1);
    CHECK(dag.nodes == std::vector<int32_t>(nodes.begin(), nodes.end()));
    std::set<std::pair<int32_t, int32_t>> dag_edges;
    for (int32_t u = 0; u < static_cast<int32_t>(dag.succ.size()); ++u) {
        REQUIRE(std::is_sorted(dag.succ[u].begin(), dag.succ[u].end()));
        for (int32_t v : dag.succ[u]) dag_edges.insert({u, v});
    }
    CHECK(dag_edges == edges);
}

/* Floyd-Warshall, a different algorithm than the BFS under test. */
std::vector<std::vector<int64_t>> floyd_warshall(const std::vector<std::vector<int32_t>>& adj) {
    const int64_t inf = 1 << 28;
    size_t n = adj.size();
    std::vector<std::vector<int64_t>> d(n, std::vector<int64_t>(n, inf));
    for (size_t u = 0; u < n; ++u) {
        d[u][u] = 0;
        for (int32_t v : adj[u]) d[u][v] = 1;
    }
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

topo::TopologySnapshot random_snap(Rng& rng, int n, double p) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.next_double() < p) edges.push_back({a, b});
    return make_snap(n, edges);
}

}  // namespace

TEST_SUITE("flow") {
    TEST_CASE("hop distances match Floyd-Warshall on random graphs") {
        Rng rng(0xf10e0001ULL);
        for (int trial = 0; trial < 25; ++trial) {
            auto snap = random_snap(rng, 24, 0.12);
            auto adj = snap.adjacency();
            auto bfs = flow::all_pairs_distances(adj);
            auto fw = floyd_warshall(adj);
            for (size_t u = 0; u < adj.size(); ++u)
                for (size_t v = 0; v < adj.size(); ++v) {
                    int64_t expect = fw[u][v] >= (1 << 28) ? flow::kUnreachable : fw[u][v];
                    REQUIRE(bfs[u][v] == expect);
                }
        }
    }

    TEST_CASE("line graph: one path, every hop forced") {
        auto snap = make_snap(3, {{0, 1}, {1, 2}});
        auto dag = flow::shortest_path_dag(snap, 0, 2);
        CHECK(dag.hop_distance == 2);
        CHECK(dag.nodes == std::vector<int32_t>{0, 1, 2});
        CHECK(dag.succ[0] == std::vector<int32_t>{1});
        CHECK(dag.succ[1] == std::vector<int32_t>{2});
        CHECK(dag.succ[2].empty());
    }

    TEST_CASE("triangle: the direct edge wins, the detour is excluded") {
        auto snap = make_snap(3, {{0, 1}, {1, 2}, {0, 2}});
        auto dag = flow::shortest_path_dag(snap, 0, 2);
        CHECK(dag.hop_distance == 1);
        CHECK(dag.nodes == std::vector<int32_t>{0, 2});
        CHECK(dag.succ[0] == std::vector<int32_t>{2});
        CHECK(dag.succ[1].empty());
    }

    TEST_CASE("square: both equal-cost paths are kept") {
        auto snap = make_snap(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
        auto dag = flow::shortest_path_dag(snap, 0, 2);
        CHECK(dag.hop_distance == 2);
        CHECK(dag.nodes == std::vector<int32_t>{0, 1, 2, 3});
        CHECK(dag.succ[0] == std::vector<int32_t>{1, 3});
        CHECK(dag.succ[1] == std::vector<int32_t>{2});
        CHECK(dag.succ[3] == std::vector<int32_t>{2});
    }

    TEST_CASE("dag equals path enumeration on random small graphs") {
        Rng rng(0xf10e0002ULL);
        for (int trial = 0; trial < 40; ++trial) {
            int n = 4 + static_cast<int>(rng.next_below(5));
            auto snap = random_snap(rng, n, 0.35);
            for (int32_t s = 0; s < n; ++s)
                for (int32_t d = 0; d < n; ++d)
                    if (s != d)
                        check_dag_against_enumeration(snap, static_cast<uint32_t>(s),
                                                      static_cast<uint32_t>(d));
        }
    }

    TEST_CASE("degenerate pairs") {
        auto snap = make_snap(4, {{0, 1}});
        auto self = flow::shortest_path_dag(snap, 2, 2);
        CHECK(self.hop_distance == 0);
        CHECK(self.nodes == std::vector<int32_t>{2});
        for (const auto& s : self.succ) CHECK(s.empty());
        CHECK_THROWS_AS((void)flow::shortest_path_dag(snap, 0, 3), flow::UnreachableError);
        CHECK_THROWS_AS((void)flow::shortest_path_dag(snap, 0, 99), flow::UnreachableError);
    }

    TEST_CASE("flow sets on the line: middle node sees everything") {
        auto snap = make_snap(3, {{0, 1}, {1, 2}});
        auto result = flow::flow_sets(snap, 7);
        REQUIRE(result.sets.size() == 3);
        CHECK(result.unreachable_pairs == 0);
        CHECK(result.sets[0].epoch == 7);
        // Node 1 lies on every min-hop path of all six ordered pairs.
        CHECK(result.sets[1].flows.size() == 6);
        // End nodes observe only the four pairs they terminate.
        std::vector<flow::FlowKey> expect0{{0, 1}, {0, 2}, {1, 0}, {2, 0}};
        CHECK(result.sets[0].flows == expect0);
        std::vector<flow::FlowKey> expect2{{0, 2}, {1, 2}, {2, 0}, {2, 1}};
        CHECK(result.sets[2].flows == expect2);
    }

    TEST_CASE("flow sets agree with per-pair dag membership") {
        Rng rng(0xf10e0003ULL);
        auto snap = random_snap(rng, 12, 0.25);
        auto result = flow::flow_sets(snap, 1);
        uint64_t unreachable = 0;
        std::vector<std::set<std::pair<uint32_t, uint32_t>>> expect(12);
        for (uint32_t u = 0; u < 12; ++u)
            for (uint32_t v = 0; v < 12; ++v) {
                if (u == v) continue;
                try {
                    auto dag = flow::shortest_path_dag(snap, u, v);
                    for (int32_t k : dag.nodes) expect[static_cast<size_t>(k)].insert({u, v});
                } catch (const flow::UnreachableError&) {
                    ++unreachable;
                }
            }
        CHECK(result.unreachable_pairs == unreachable);
        for (size_t k = 0; k < 12; ++k) {
            REQUIRE(result.sets[k].flows.size() == expect[k].size());
            REQUIRE(std::is_sorted(result.sets[k].flows.begin(), result.sets[k].flows.end()));
            size_t i = 0;
            for (const auto& [s, d] : expect[k]) {
                CHECK(result.sets[k].flows[i].src == s);
                CHECK(result.sets[k].flows[i].dst == d);
                ++i;
            }
        }
    }

    TEST_CASE("flow set csv layout") {
        auto snap = make_snap(2, {{0, 1}});
        auto result = flow::flow_sets(snap, 0);
        auto csv = flow::format_flow_sets_csv(result.sets);
        CHECK(csv == "sat_id,src,dst\n0,0,1\n0,1,0\n1,0,1\n1,1,0\n");
    }
}
