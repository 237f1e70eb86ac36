#ifndef CSTARS_TRAFFIC_HPP
#define CSTARS_TRAFFIC_HPP

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/common.hpp"
#include "cstars/flow.hpp"
#include "cstars/sketch.hpp"

namespace cstars::traffic {

struct GroundStation {
    uint32_t id = 0;
    double longitude_deg = 0.0;  // [-180, 180]
    double latitude_deg = 0.0;   // [-90, 90]
};

/** Network-wide demand shape. Demand is measured in 64-byte units per
 *  second; isl_bandwidth_units is the per-terminal ceiling B the offered
 *  load scales against. */
struct TrafficParams {
    double offerload = 0.1;             // fraction of capacity offered
    double isl_bandwidth_units = 6.0;   // units per second per terminal
    uint32_t n_ter = 0;                 // number of ground stations
    std::array<double, 24> diurnal{};   // relative load per local hour
    uint64_t rng_seed = 1;
};

class TrafficError : public std::runtime_error {
public:
    explicit TrafficError(const std::string& msg) : std::runtime_error(msg) {}
};

class NoAccessSatelliteError : public TrafficError {
public:
    explicit NoAccessSatelliteError(const std::string& msg) : TrafficError(msg) {}
};

/** Total offered demand at any instant: offerload * B * n_ter. */
double total_demand(const TrafficParams& params);

/** Local hour of a longitude at simulation time t: one hour per 3600 s of
 *  clock plus one per 15 degrees east, wrapped to [0, 24). */
int local_hour(double t_s, double longitude_deg);

/** Per-station share at time t: the total demand is distributed over local
 *  hours by diurnal weight (normalized over the hours that currently hold
 *  stations, so the shares always add back up to the total) and split
 *  evenly inside each hour bucket. */
double station_demand(const TrafficParams& params, const std::vector<GroundStation>& stations,
                      size_t station_index, double t_s);

/** Station-to-station demand row for one source: each destination draws a
 *  U(0.1, 1) factor from the per-(epoch, source) stream, then the row is
 *  rescaled so it sums exactly to the source's share. Keys are destination
 *  indices. */
std::map<uint32_t, double> pairwise_demand(const TrafficParams& params,
                                           const std::vector<GroundStation>& stations,
                                           size_t src_index, double t_s, uint64_t epoch);

/** Demand folded onto the constellation through a station-to-satellite
 *  access map (station index -> satellite id, -1 for stations currently
 *  without access). Station pairs that land on the same satellite never
 *  enter the network and accrue to local_units; pairs with an unattached
 *  endpoint accrue to unserved_units. */
struct SatelliteMatrix {
    std::map<flow::FlowKey, double> demand_units;  // per-second, by (src sat, dst sat)
    double local_units = 0.0;
    double unserved_units = 0.0;
};

SatelliteMatrix to_satellite_matrix(const TrafficParams& params,
                                    const std::vector<GroundStation>& stations,
                                    const std::vector<int32_t>& access_map, double t_s,
                                    uint64_t epoch);

/** Turns fractional per-epoch demand into unit packets. Whole units emit
 *  one 64-byte packet each; the fractional remainder carries to the next
 *  epoch per flow, so mass is conserved to within one unit per flow at all
 *  times. Packet order is a deterministic shuffle of the epoch's batch. */
class Packetizer {
public:
    explicit Packetizer(uint64_t rng_seed) : rng_seed_(rng_seed) {}

    std::vector<sketch::PacketRecord> packetize(const std::map<flow::FlowKey, double>& demand_units,
                                                uint64_t epoch, double t_s);

    double carry(const flow::FlowKey& key) const;
    void reset() { carry_.clear(); }

private:
    uint64_t rng_seed_;
    std::map<flow::FlowKey, double> carry_;
};

/** Deterministic station layout: stations spread in longitude with a
 *  seeded jitter, latitudes drawn within +-lat_limit_deg. Used when the
 *  scenario does not pin explicit coordinates. */
std::vector<GroundStation> default_stations(uint32_t count, uint64_t seed,
                                            double lat_limit_deg = 55.0);

/** A plausible day curve used by the bundled scenarios: quiet small hours,
 *  a working-day shoulder, an evening peak. */
std::array<double, 24> default_diurnal_profile();

}  // namespace cstars::traffic

#endif
