#include "cstars/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace cstars::traffic {

double total_demand(const TrafficParams& params) {
    return params.offerload * params.isl_bandwidth_units * params.n_ter;
}

int local_hour(double t_s, double longitude_deg) {
    double h = std::floor(t_s / 3600.0) + std::floor(longitude_deg / 15.0);
    double wrapped = std::fmod(h, 24.0);
    if (wrapped < 0.0) wrapped += 24.0;
    return static_cast<int>(wrapped);
}

namespace {

struct HourBuckets {
    std::array<uint32_t, 24> count{};
    double active_weight = 0.0;  // sum of diurnal weights over occupied hours
};

HourBuckets bucket_stations(const TrafficParams& params,
                            const std::vector<GroundStation>& stations, double t_s) {
    HourBuckets b;
    for (const GroundStation& st : stations) b.count[local_hour(t_s, st.longitude_deg)] += 1;
    for (int h = 0; h < 24; ++h)
        if (b.count[h] > 0) b.active_weight += params.diurnal[h];
    return b;
}

void check_params(const TrafficParams& params, const std::vector<GroundStation>& stations) {
    if (params.n_ter != stations.size())
        throw TrafficError("n_ter disagrees with the station list length");
    if (params.offerload < 0.0 || params.isl_bandwidth_units <= 0.0)
        throw TrafficError("offered load must be >= 0 and bandwidth positive");
    for (double w : params.diurnal)
        if (w < 0.0) throw TrafficError("diurnal weights must be non-negative");
}

}  // namespace

double station_demand(const TrafficParams& params, const std::vector<GroundStation>& stations,
                      size_t station_index, double t_s) {
    check_params(params, stations);
    if (station_index >= stations.size()) throw TrafficError("station index out of range");

    HourBuckets b = bucket_stations(params, stations, t_s);
    int hour = local_hour(t_s, stations[station_index].longitude_deg);
    if (params.diurnal[hour] == 0.0 || b.active_weight == 0.0) return 0.0;
    double share = params.diurnal[hour] / b.active_weight;
    return total_demand(params) * share / b.count[hour];
}

std::map<uint32_t, double> pairwise_demand(const TrafficParams& params,
                                           const std::vector<GroundStation>& stations,
                                           size_t src_index, double t_s, uint64_t epoch) {
    double row_total = station_demand(params, stations, src_index, t_s);

    std::map<uint32_t, double> row;
    if (stations.size() < 2) return row;

    Rng rng(derive_seed(params.rng_seed, 0xd3, epoch, src_index));
    double sum = 0.0;
    for (size_t j = 0; j < stations.size(); ++j) {
        if (j == src_index) continue;
        double u = rng.uniform(0.1, 1.0);
        row[static_cast<uint32_t>(j)] = u;
        sum += u;
    }
    /* Rescale so the row adds up to exactly the station's share. */
    double scale = (sum > 0.0) ? row_total / sum : 0.0;
    for (auto& [j, v] : row) v *= scale;
    return row;
}

SatelliteMatrix to_satellite_matrix(const TrafficParams& params,
                                    const std::vector<GroundStation>& stations,
                                    const std::vector<int32_t>& access_map, double t_s,
                                    uint64_t epoch) {
    check_params(params, stations);
    if (access_map.size() != stations.size())
        throw NoAccessSatelliteError("access map does not cover every station");

    SatelliteMatrix out;
    for (size_t i = 0; i < stations.size(); ++i) {
        auto row = pairwise_demand(params, stations, i, t_s, epoch);
        for (const auto& [j, units] : row) {
            if (units <= 0.0) continue;
            int32_t sat_i = access_map[i];
            int32_t sat_j = access_map[j];
            if (sat_i < 0 || sat_j < 0) {
                out.unserved_units += units;
                continue;
            }
            if (sat_i == sat_j) {
                out.local_units += units;
                continue;
            }
            out.demand_units[{static_cast<uint32_t>(sat_i), static_cast<uint32_t>(sat_j)}] += units;
        }
    }
    return out;
}

std::vector<sketch::PacketRecord> Packetizer::packetize(
    const std::map<flow::FlowKey, double>& demand_units, uint64_t epoch, double t_s) {
    std::vector<sketch::PacketRecord> out;
    for (const auto& [key, units] : demand_units) {
        double total = carry_[key] + units;
        double whole = std::floor(total + 1e-12);  // absorb float drift at unit boundaries
        carry_[key] = std::max(total - whole, 0.0);
        for (uint64_t k = 0; k < static_cast<uint64_t>(whole); ++k) {
            sketch::PacketRecord pkt;
            pkt.src = key.src;
            pkt.dst = key.dst;
            pkt.size_bytes = 64;
            pkt.out_port = 0;  // assigned per hop by the forwarder
            pkt.t_s = t_s;
            out.push_back(pkt);
        }
    }
    Rng rng(derive_seed(rng_seed_, 0x9a, epoch));
    rng.shuffle(out);
    return out;
}

double Packetizer::carry(const flow::FlowKey& key) const {
    auto it = carry_.find(key);
    return it == carry_.end() ? 0.0 : it->second;
}

std::vector<GroundStation> default_stations(uint32_t count, uint64_t seed, double lat_limit_deg) {
    std::vector<GroundStation> out;
    out.reserve(count);
    Rng rng(derive_seed(seed, 0x57a7));
    for (uint32_t i = 0; i < count; ++i) {
        GroundStation st;
        st.id = i;
        double base = 360.0 * i / count - 180.0;
        st.longitude_deg = base + rng.uniform(-0.4, 0.4) * 360.0 / count;
        st.longitude_deg = std::clamp(st.longitude_deg, -180.0, 180.0);
        /* Bias toward temperate latitudes, where stations actually sit. */
        double u = rng.uniform(-1.0, 1.0);
        st.latitude_deg = lat_limit_deg * std::copysign(std::sqrt(std::abs(u)), u) * 0.9;
        out.push_back(st);
    }
    return out;
}

std::array<double, 24> default_diurnal_profile() {
    return {0.30, 0.22, 0.16, 0.12, 0.10, 0.12, 0.20, 0.35, 0.50, 0.65, 0.75, 0.80,
            0.85, 0.80, 0.75, 0.70, 0.75, 0.85, 0.95, 1.00, 0.90, 0.70, 0.50, 0.40};
}

}  // namespace cstars::traffic
