#ifndef CSTARS_SCENARIO_HPP
#define CSTARS_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstars/topology.hpp"
#include "cstars/traffic.hpp"

namespace cstars::sim {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Tuning knobs of the comparison sketches. Depths and splits follow the
 *  usual published settings; they are configuration, not behavior. */
struct SketchParams {
    uint32_t cm_depth = 5;
    uint32_t fl_cm_depth = 2;
    double es_heavy_fraction = 0.25;
    double fl_fp_rate = 0.01;
};

/** Everything one run needs. Loadable from JSON; every field has a usable
 *  default except the constellation and traffic shape. */
struct Scenario {
    std::string name = "scenario";
    topo::ConstellationSpec constellation;
    std::string tle_file;  // non-empty: orbits come from this file instead
    topo::IslPolicy isl;
    traffic::TrafficParams traffic;
    std::vector<traffic::GroundStation> stations;  // empty: generated from traffic.n_ter

    double epoch_s = 1.0;
    double horizon_s = 100.0;
    double seed_period_s = 1.0;  // seed/readback cadence; multiple of epoch_s
    uint64_t rng_seed = 42;
    double min_elevation_deg = 10.0;

    std::vector<std::string> schemes{"cs", "cm", "es", "fl"};
    std::map<std::string, uint64_t> memory_bytes;  // per satellite, by scheme

    std::string re_aggregate = "cardinality";  // or "mass"
    uint64_t max_hops_per_epoch = 0;           // 0: packets finish inside their epoch
    double control_loss_rate = 0.0;            // probability a readback uplink is lost once
    int parser_lanes = 4;
    uint64_t seed_cap_factor = 16;
    SketchParams sketch;

    int epochs() const { return static_cast<int>(horizon_s / epoch_s + 0.5); }
    int epochs_per_period() const { return static_cast<int>(seed_period_s / epoch_s + 0.5); }
    bool scheme_enabled(const std::string& s) const;
    uint64_t scheme_memory(const std::string& s) const;
};

/** Parses and validates a scenario file; throws ConfigError with every
 *  problem found, one per line. */
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

/** All validation problems of a scenario; empty means runnable. */
std::vector<std::string> validate_scenario(const Scenario& sc);

/** Canonical JSON form; key order is fixed, so two configs that differ
 *  only in formatting or key order serialize identically. */
std::string scenario_to_json(const Scenario& sc);

/** Hash of the canonical form, stable across key reordering. */
uint64_t scenario_hash(const Scenario& sc);

}  // namespace cstars::sim

#endif
