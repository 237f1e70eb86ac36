#include "cstars/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cstars::topo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_spec(const ConstellationSpec& spec) {
    if (spec.planes <= 0 || spec.sats_per_plane <= 0)
        throw TopologyError("constellation needs at least one plane and one satellite");
    if (spec.altitude_km <= 0.0) throw TopologyError("altitude must be positive");
    if (spec.raan_spread_deg <= 0.0 || spec.raan_spread_deg > 360.0)
        throw TopologyError("raan spread must lie in (0, 360]");
}

void add_port_link(TopologySnapshot& snap, int32_t from, int32_t to, int port_from, int port_to,
                   LinkKind kind) {
    auto& slot_a = snap.port_map[from][port_from - 1];
    auto& slot_b = snap.port_map[to][port_to - 1];
    if (slot_a != -1 || slot_b != -1)
        throw TopologyError("port already occupied while wiring node " + std::to_string(from) +
                            " to " + std::to_string(to));
    slot_a = to;
    slot_b = from;
    Link l{std::min(from, to), std::max(from, to), kind};
    snap.links.push_back(l);
}

}  // namespace

bool TopologySnapshot::has_link(int32_t a, int32_t b) const {
    Link probe{std::min(a, b), std::max(a, b), LinkKind::intra_plane};
    return std::binary_search(links.begin(), links.end(), probe);
}

int TopologySnapshot::degree(int32_t node) const {
    int d = 0;
    for (const Link& l : links)
        if (l.a == node || l.b == node) ++d;
    return d;
}

std::vector<std::vector<int32_t>> TopologySnapshot::adjacency() const {
    std::vector<std::vector<int32_t>> adj(node_count);
    for (const Link& l : links) {
        adj[l.a].push_back(l.b);
        adj[l.b].push_back(l.a);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());
    return adj;
}

int32_t TopologySnapshot::port_to(int32_t node, int32_t neighbor) const {
    if (port_map.empty()) return -1;
    for (int p = 0; p < kPortCount; ++p)
        if (port_map[node][p] == neighbor) return p + 1;
    return -1;
}

std::vector<orbit::KeplerianElements> walker_elements(const ConstellationSpec& spec,
                                                      const orbit::EarthModel& earth) {
    check_spec(spec);
    std::vector<orbit::KeplerianElements> out;
    out.reserve(spec.total());

    double spread_rad = spec.raan_spread_deg * std::numbers::pi / 180.0;
    double inc_rad = spec.inclination_deg * std::numbers::pi / 180.0;
    double a = earth.radius_km + spec.altitude_km;
    int total = spec.total();

    for (int p = 0; p < spec.planes; ++p) {
        double raan = spread_rad * p / spec.planes;
        for (int j = 0; j < spec.sats_per_plane; ++j) {
            orbit::KeplerianElements el;
            el.semi_major_axis_km = a;
            el.eccentricity = 0.0;
            el.inclination_rad = inc_rad;
            el.raan_rad = std::fmod(raan, kTwoPi);
            el.arg_perigee_rad = 0.0;
            el.mean_anomaly_rad =
                std::fmod(kTwoPi * j / spec.sats_per_plane + kTwoPi * spec.phasing * p / total,
                          kTwoPi);
            el.epoch_s = 0.0;
            out.push_back(el);
        }
    }
    return out;
}

std::vector<orbit::StateVector> states_at(const std::vector<orbit::KeplerianElements>& elements,
                                          double t_s, const orbit::EarthModel& earth) {
    std::vector<orbit::StateVector> out;
    out.reserve(elements.size());
    for (const auto& el : elements) {
        orbit::KeplerianElements adv = el;
        double n = std::sqrt(earth.mu_km3_s2 / (el.semi_major_axis_km * el.semi_major_axis_km *
                                                el.semi_major_axis_km));
        adv.mean_anomaly_rad = std::fmod(el.mean_anomaly_rad + n * (t_s - el.epoch_s), kTwoPi);
        if (adv.mean_anomaly_rad < 0.0) adv.mean_anomaly_rad += kTwoPi;
        adv.epoch_s = t_s;
        out.push_back(orbit::elements_to_state(adv, earth));
    }
    return out;
}

TopologySnapshot visibility_graph(const std::vector<orbit::StateVector>& states,
                                  const orbit::EarthModel& earth) {
    TopologySnapshot snap;
    snap.node_count = static_cast<int32_t>(states.size());
    if (!states.empty()) snap.t_s = states.front().t_s;

    for (size_t i = 0; i < states.size(); ++i) {
        for (size_t j = i + 1; j < states.size(); ++j) {
            if (orbit::line_of_sight(states[i], states[j], earth))
                snap.links.push_back(
                    {static_cast<int32_t>(i), static_cast<int32_t>(j), LinkKind::intra_plane});
        }
    }
    std::sort(snap.links.begin(), snap.links.end());
    return snap;
}

std::vector<std::pair<int, int>> derive_seam_pairs(const ConstellationSpec& spec) {
    check_spec(spec);
    if (spec.planes < 2) return {};

    std::vector<std::pair<double, int>> raans;  // (raan_deg, plane)
    for (int p = 0; p < spec.planes; ++p)
        raans.emplace_back(spec.raan_spread_deg * p / spec.planes, p);
    std::sort(raans.begin(), raans.end());

    double best_gap = -1.0;
    std::pair<int, int> best{-1, -1};
    for (size_t i = 0; i < raans.size(); ++i) {
        size_t next = (i + 1) % raans.size();
        double gap = raans[next].first - raans[i].first;
        if (next == 0) gap += 360.0;
        /* >= so a uniform delta pattern resolves to the wrap-around pair. */
        if (gap >= best_gap) {
            best_gap = gap;
            best = {raans[i].second, raans[next].second};
        }
    }
    return {best};
}

TopologySnapshot apply_isl_policy(const TopologySnapshot& visibility,
                                  const ConstellationSpec& spec, const IslPolicy& policy,
                                  const std::vector<orbit::StateVector>& states) {
    check_spec(spec);
    if (visibility.node_count != spec.total())
        throw TopologyError("visibility graph does not match the constellation size");
    if (states.size() != static_cast<size_t>(spec.total()))
        throw TopologyError("state list does not match the constellation size");
    if (policy.max_terminals < kPortCount)
        throw TopologyError("policy allows fewer terminals than the grid needs");

    auto seams = policy.seam_plane_pairs.empty() && policy.seam_enabled
                     ? derive_seam_pairs(spec)
                     : policy.seam_plane_pairs;
    auto is_seam = [&](int pa, int pb) {
        if (!policy.seam_enabled) return false;
        for (auto [x, y] : seams)
            if ((x == pa && y == pb) || (x == pb && y == pa)) return true;
        return false;
    };

    const int spp = spec.sats_per_plane;
    auto node_id = [&](int plane, int idx) { return plane * spp + idx; };

    TopologySnapshot snap;
    snap.t_s = visibility.t_s;
    snap.node_count = spec.total();
    snap.port_map.assign(snap.node_count, {-1, -1, -1, -1});

    /* Intra-plane ring: fore is the next in-plane index. A two-satellite
     * plane has only one distinct neighbor, wired fore only. */
    for (int p = 0; p < spec.planes; ++p) {
        int ring = (spp >= 3) ? spp : (spp == 2 ? 1 : 0);
        for (int j = 0; j < ring; ++j) {
            int32_t from = node_id(p, j);
            int32_t to = node_id(p, (j + 1) % spp);
            if (!visibility.has_link(from, to)) {
                snap.infeasible_links.push_back(
                    {std::min(from, to), std::max(from, to), LinkKind::intra_plane});
                continue;
            }
            add_port_link(snap, from, to, kPortFore, kPortAft, LinkKind::intra_plane);
        }
    }

    /* Inter-plane grid: same in-plane index one plane to the right; the
     * Walker phasing already staggers the actual anomalies. Planes wrap so
     * a delta pattern closes; the seam rule suppresses the wrap of a star
     * pattern instead. */
    if (spec.planes >= 2) {
        int wrap = (spec.planes > 2) ? spec.planes : 1;  // avoid double links for 2 planes
        for (int p = 0; p < wrap; ++p) {
            int pr = (p + 1) % spec.planes;
            if (is_seam(p, pr)) continue;
            for (int j = 0; j < spp; ++j) {
                int32_t from = node_id(p, j);
                int32_t to = node_id(pr, j);
                double lat_a = std::abs(latitude_deg(states[from].position_km));
                double lat_b = std::abs(latitude_deg(states[to].position_km));
                if (lat_a > policy.high_latitude_cutoff_deg ||
                    lat_b > policy.high_latitude_cutoff_deg)
                    continue;
                if (!visibility.has_link(from, to)) {
                    snap.infeasible_links.push_back(
                        {std::min(from, to), std::max(from, to), LinkKind::inter_plane});
                    continue;
                }
                add_port_link(snap, from, to, kPortRight, kPortLeft, LinkKind::inter_plane);
            }
        }
    }

    std::sort(snap.links.begin(), snap.links.end());
    std::sort(snap.infeasible_links.begin(), snap.infeasible_links.end());
    return snap;
}

std::vector<TopologySnapshot> snapshot_series(const std::vector<orbit::KeplerianElements>& elements,
                                              const ConstellationSpec& spec,
                                              const IslPolicy& policy, double t0_s,
                                              double horizon_s, double step_s,
                                              const orbit::EarthModel& earth) {
    if (step_s <= 0.0) throw TopologyError("snapshot step must be positive");
    if (horizon_s < step_s) throw TopologyError("horizon shorter than one step");

    std::vector<TopologySnapshot> out;
    size_t count = static_cast<size_t>(std::floor(horizon_s / step_s + 1e-9));
    out.reserve(count);
    for (size_t k = 0; k < count; ++k) {
        double t = t0_s + step_s * static_cast<double>(k);
        auto states = states_at(elements, t, earth);
        auto vis = visibility_graph(states, earth);
        out.push_back(apply_isl_policy(vis, spec, policy, states));
    }
    return out;
}

double latitude_deg(const Vec3& position_km) {
    double r = position_km.norm();
    if (r == 0.0) return 0.0;
    return std::asin(std::clamp(position_km.z / r, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

std::string format_adjacency_list(const TopologySnapshot& snap) {
    std::ostringstream os;
    for (int32_t n = 0; n < snap.node_count; ++n) {
        os << n;
        if (!snap.port_map.empty()) {
            for (int p = 0; p < kPortCount; ++p)
                if (snap.port_map[n][p] != -1) os << ' ' << (p + 1) << ':' << snap.port_map[n][p];
        }
        os << '\n';
    }
    return os.str();
}

std::string format_adjacency_matrix_csv(const TopologySnapshot& snap) {
    std::ostringstream os;
    os << "t," << snap.t_s << '\n';
    std::vector<std::vector<char>> m(snap.node_count, std::vector<char>(snap.node_count, 0));
    for (const Link& l : snap.links) {
        m[l.a][l.b] = 1;
        m[l.b][l.a] = 1;
    }
    for (int32_t i = 0; i < snap.node_count; ++i) {
        for (int32_t j = 0; j < snap.node_count; ++j) {
            if (j) os << ',';
            os << int(m[i][j]);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace cstars::topo
