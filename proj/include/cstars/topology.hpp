#ifndef CSTARS_TOPOLOGY_HPP
#define CSTARS_TOPOLOGY_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/orbit.hpp"

namespace cstars::topo {

/** Walker-style shell: `planes` orbital planes of `sats_per_plane`
 *  satellites each, circular orbits at a common altitude and inclination.
 *  `raan_spread_deg` is the ascending-node span the planes divide evenly:
 *  360 for a delta pattern, 180 for a star pattern with a counter-rotating
 *  seam. `phasing` is the Walker F parameter (inter-plane phase offset in
 *  units of 360/(planes*sats_per_plane) degrees). */
struct ConstellationSpec {
    int planes = 0;
    int sats_per_plane = 0;
    double altitude_km = 0.0;
    double inclination_deg = 0.0;
    int phasing = 0;
    double raan_spread_deg = 360.0;
    std::string name;

    int total() const { return planes * sats_per_plane; }
};

/** Link admission rules for inter-satellite laser terminals. */
struct IslPolicy {
    int max_terminals = 4;
    bool seam_enabled = true;
    double high_latitude_cutoff_deg = 70.0;
    /* Explicit seam override; empty means derive it from the largest RAAN
     * gap between adjacent planes. */
    std::vector<std::pair<int, int>> seam_plane_pairs;
};

enum class LinkKind : uint8_t { intra_plane, inter_plane };

struct Link {
    int32_t a = -1;  // node ids, a < b
    int32_t b = -1;
    LinkKind kind = LinkKind::intra_plane;

    bool operator<(const Link& o) const { return a != o.a ? a < o.a : b < o.b; }
    bool operator==(const Link& o) const { return a == o.a && b == o.b; }
};

/* Ports on the four ISL terminals. Index = port - 1. */
constexpr int kPortFore = 1;
constexpr int kPortAft = 2;
constexpr int kPortLeft = 3;
constexpr int kPortRight = 4;
constexpr int kPortCount = 4;

/** One instant of the network: undirected links plus, once a policy has
 *  been applied, the port each link occupies on each endpoint. */
struct TopologySnapshot {
    double t_s = 0.0;
    int32_t node_count = 0;
    std::vector<Link> links;  // sorted, a < b
    /* port_map[node][port-1] = neighbor id or -1. Empty until a policy runs. */
    std::vector<std::array<int32_t, kPortCount>> port_map;
    /* Grid links the policy wanted but visibility failed; kept for audit. */
    std::vector<Link> infeasible_links;

    bool has_link(int32_t a, int32_t b) const;
    int degree(int32_t node) const;
    /* Neighbor lists in ascending node id, built from links. */
    std::vector<std::vector<int32_t>> adjacency() const;
    int32_t port_to(int32_t node, int32_t neighbor) const;  // -1 if not linked
};

class TopologyError : public std::runtime_error {
public:
    explicit TopologyError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Element sets for every satellite of a Walker shell at epoch 0. Node id
 *  of satellite j in plane p is p * sats_per_plane + j. */
std::vector<orbit::KeplerianElements> walker_elements(const ConstellationSpec& spec,
                                                      const orbit::EarthModel& earth = {});

/** Inertial states of a full element list at time t_s. */
std::vector<orbit::StateVector> states_at(const std::vector<orbit::KeplerianElements>& elements,
                                          double t_s, const orbit::EarthModel& earth = {});

/** All-pairs visibility: a link for every pair of satellites whose
 *  connecting segment clears the Earth sphere. No ports are assigned. */
TopologySnapshot visibility_graph(const std::vector<orbit::StateVector>& states,
                                  const orbit::EarthModel& earth = {});

/** Plane pairs adjacent in RAAN order with the widest angular gap; these
 *  carry counter-rotating traffic in a star pattern and get no cross links
 *  while the seam rule is on. */
std::vector<std::pair<int, int>> derive_seam_pairs(const ConstellationSpec& spec);

/** Restricts a visibility graph to the +grid ISL pattern: fore/aft ring
 *  neighbors in the same plane on ports 1/2, same-index satellites in the
 *  two adjacent planes on ports 3/4. Inter-plane links are withheld across
 *  the seam and above the latitude cutoff. Grid links that fail visibility
 *  are dropped and recorded, never substituted. */
TopologySnapshot apply_isl_policy(const TopologySnapshot& visibility,
                                  const ConstellationSpec& spec, const IslPolicy& policy,
                                  const std::vector<orbit::StateVector>& states);

/** Snapshot per step over [t0, t0 + horizon): floor(horizon/step) entries. */
std::vector<TopologySnapshot> snapshot_series(const std::vector<orbit::KeplerianElements>& elements,
                                              const ConstellationSpec& spec,
                                              const IslPolicy& policy, double t0_s,
                                              double horizon_s, double step_s,
                                              const orbit::EarthModel& earth = {});

/** Geodetic latitude on the spherical model, degrees. */
double latitude_deg(const Vec3& position_km);

/** Plain text adjacency list, one "id port:neighbor ..." line per node. */
std::string format_adjacency_list(const TopologySnapshot& snap);

/** Dense 0/1 adjacency matrix as CSV, first line "t,<t_s>". */
std::string format_adjacency_matrix_csv(const TopologySnapshot& snap);

}  // namespace cstars::topo

#endif
