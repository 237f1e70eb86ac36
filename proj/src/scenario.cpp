#include "cstars/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cstars/common.hpp"

namespace cstars::sim {

using nlohmann::json;

namespace {

const std::set<std::string> kSchemes = {"cs", "cm", "es", "fl"};

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>& problems) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            problems.push_back("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read_into(const json& obj, const char* key, T& target) {
    if (obj.contains(key)) obj.at(key).get_to(target);
}

}  // namespace

bool Scenario::scheme_enabled(const std::string& s) const {
    return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

uint64_t Scenario::scheme_memory(const std::string& s) const {
    auto it = memory_bytes.find(s);
    if (it == memory_bytes.end())
        throw ConfigError("no memory budget configured for scheme " + s);
    return it->second;
}

Scenario scenario_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }

    std::vector<std::string> problems;
    reject_unknown_keys(root,
                        {"name", "constellation", "tle_file", "isl", "traffic", "epoch_s",
                         "horizon_s", "seed_period_s", "rng_seed", "min_elevation_deg", "schemes",
                         "memory_bytes", "re_aggregate", "max_hops_per_epoch", "control_loss_rate",
                         "parser_lanes", "seed_cap_factor", "sketch_params"},
                        "scenario", problems);

    Scenario sc;
    read_into(root, "name", sc.name);
    read_into(root, "tle_file", sc.tle_file);
    read_into(root, "epoch_s", sc.epoch_s);
    read_into(root, "horizon_s", sc.horizon_s);
    sc.seed_period_s = sc.epoch_s;
    read_into(root, "seed_period_s", sc.seed_period_s);
    read_into(root, "rng_seed", sc.rng_seed);
    read_into(root, "min_elevation_deg", sc.min_elevation_deg);
    read_into(root, "re_aggregate", sc.re_aggregate);
    read_into(root, "max_hops_per_epoch", sc.max_hops_per_epoch);
    read_into(root, "control_loss_rate", sc.control_loss_rate);
    read_into(root, "parser_lanes", sc.parser_lanes);
    read_into(root, "seed_cap_factor", sc.seed_cap_factor);

    if (root.contains("constellation")) {
        const json& c = root["constellation"];
        reject_unknown_keys(c,
                            {"name", "planes", "sats_per_plane", "altitude_km", "inclination_deg",
                             "phasing", "raan_spread_deg"},
                            "constellation", problems);
        read_into(c, "name", sc.constellation.name);
        read_into(c, "planes", sc.constellation.planes);
        read_into(c, "sats_per_plane", sc.constellation.sats_per_plane);
        read_into(c, "altitude_km", sc.constellation.altitude_km);
        read_into(c, "inclination_deg", sc.constellation.inclination_deg);
        read_into(c, "phasing", sc.constellation.phasing);
        read_into(c, "raan_spread_deg", sc.constellation.raan_spread_deg);
    } else {
        problems.push_back("missing 'constellation'");
    }

    if (root.contains("isl")) {
        const json& c = root["isl"];
        reject_unknown_keys(
            c, {"max_terminals", "seam_enabled", "high_latitude_cutoff_deg", "seam_plane_pairs"},
            "isl", problems);
        read_into(c, "max_terminals", sc.isl.max_terminals);
        read_into(c, "seam_enabled", sc.isl.seam_enabled);
        read_into(c, "high_latitude_cutoff_deg", sc.isl.high_latitude_cutoff_deg);
        if (c.contains("seam_plane_pairs"))
            for (const auto& p : c["seam_plane_pairs"])
                sc.isl.seam_plane_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }

    if (root.contains("traffic")) {
        const json& c = root["traffic"];
        reject_unknown_keys(
            c, {"offerload", "isl_bandwidth_units", "stations", "diurnal", "rng_seed"}, "traffic",
            problems);
        read_into(c, "offerload", sc.traffic.offerload);
        read_into(c, "isl_bandwidth_units", sc.traffic.isl_bandwidth_units);
        read_into(c, "rng_seed", sc.traffic.rng_seed);
        sc.traffic.diurnal = traffic::default_diurnal_profile();
        if (c.contains("diurnal")) {
            const json& d = c["diurnal"];
            if (d.size() != 24)
                problems.push_back("traffic.diurnal must list exactly 24 weights");
            else
                for (int i = 0; i < 24; ++i) sc.traffic.diurnal[i] = d[i].get<double>();
        }
        if (c.contains("stations")) {
            const json& s = c["stations"];
            if (s.is_number_unsigned() || s.is_number_integer()) {
                sc.traffic.n_ter = s.get<uint32_t>();
            } else if (s.is_array()) {
                for (const auto& e : s) {
                    traffic::GroundStation st;
                    st.id = e.at("id").get<uint32_t>();
                    st.longitude_deg = e.at("lon").get<double>();
                    st.latitude_deg = e.at("lat").get<double>();
                    sc.stations.push_back(st);
                }
                sc.traffic.n_ter = static_cast<uint32_t>(sc.stations.size());
            } else {
                problems.push_back("traffic.stations must be a count or a list");
            }
        }
    } else {
        problems.push_back("missing 'traffic'");
    }

    if (root.contains("schemes")) {
        sc.schemes.clear();
        for (const auto& s : root["schemes"]) sc.schemes.push_back(s.get<std::string>());
    }
    if (root.contains("memory_bytes"))
        for (auto it = root["memory_bytes"].begin(); it != root["memory_bytes"].end(); ++it)
            sc.memory_bytes[it.key()] = it.value().get<uint64_t>();

    if (root.contains("sketch_params")) {
        const json& c = root["sketch_params"];
        reject_unknown_keys(c, {"cm_depth", "fl_cm_depth", "es_heavy_fraction", "fl_fp_rate"},
                            "sketch_params", problems);
        read_into(c, "cm_depth", sc.sketch.cm_depth);
        read_into(c, "fl_cm_depth", sc.sketch.fl_cm_depth);
        read_into(c, "es_heavy_fraction", sc.sketch.es_heavy_fraction);
        read_into(c, "fl_fp_rate", sc.sketch.fl_fp_rate);
    }

    if (!problems.empty()) {
        std::string msg = "scenario has problems:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }

    auto more = validate_scenario(sc);
    if (!more.empty()) {
        std::string msg = "scenario fails validation:";
        for (const auto& p : more) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
    std::vector<std::string> problems;

    if (sc.tle_file.empty()) {
        if (sc.constellation.planes <= 0 || sc.constellation.sats_per_plane <= 0)
            problems.push_back("constellation needs positive planes and sats_per_plane");
        if (sc.constellation.altitude_km <= 0)
            problems.push_back("constellation altitude must be positive");
        if (sc.constellation.raan_spread_deg <= 0 || sc.constellation.raan_spread_deg > 360)
            problems.push_back("raan_spread_deg must lie in (0, 360]");
    }

    if (sc.epoch_s <= 0) problems.push_back("epoch_s must be positive");
    if (sc.horizon_s < sc.epoch_s) problems.push_back("horizon_s must cover at least one epoch");
    double epochs = sc.horizon_s / sc.epoch_s;
    if (std::abs(epochs - std::round(epochs)) > 1e-9)
        problems.push_back("horizon_s must be a whole number of epochs");
    double period = sc.seed_period_s / sc.epoch_s;
    if (sc.seed_period_s < sc.epoch_s || std::abs(period - std::round(period)) > 1e-9)
        problems.push_back("seed_period_s must be a positive multiple of epoch_s");

    if (sc.schemes.empty()) problems.push_back("at least one scheme must be enabled");
    for (const auto& s : sc.schemes) {
        if (!kSchemes.count(s)) {
            problems.push_back("unknown scheme '" + s + "' (known: cs, cm, es, fl)");
            continue;
        }
        auto it = sc.memory_bytes.find(s);
        if (it == sc.memory_bytes.end())
            problems.push_back("scheme '" + s + "' has no memory budget");
        else if (it->second == 0)
            problems.push_back("scheme '" + s + "' has a zero memory budget");
    }

    if (sc.traffic.n_ter < 2) problems.push_back("traffic needs at least two ground stations");
    if (!sc.stations.empty() && sc.stations.size() != sc.traffic.n_ter)
        problems.push_back("explicit station list disagrees with n_ter");
    if (sc.traffic.offerload < 0) problems.push_back("offerload must be non-negative");
    if (sc.traffic.isl_bandwidth_units <= 0)
        problems.push_back("isl_bandwidth_units must be positive");
    bool any_weight = false;
    for (double w : sc.traffic.diurnal) {
        if (w < 0) problems.push_back("diurnal weights must be non-negative");
        if (w > 0) any_weight = true;
    }
    if (!any_weight) problems.push_back("diurnal profile must have a positive weight somewhere");

    if (sc.re_aggregate != "cardinality" && sc.re_aggregate != "mass")
        problems.push_back("re_aggregate must be 'cardinality' or 'mass'");
    if (sc.control_loss_rate < 0 || sc.control_loss_rate >= 1)
        problems.push_back("control_loss_rate must lie in [0, 1)");
    if (sc.parser_lanes < 1) problems.push_back("parser_lanes must be at least 1");
    if (sc.seed_cap_factor < 1) problems.push_back("seed_cap_factor must be at least 1");

    if (sc.sketch.cm_depth < 1 || sc.sketch.fl_cm_depth < 1)
        problems.push_back("sketch depths must be at least 1");
    if (sc.sketch.es_heavy_fraction <= 0 || sc.sketch.es_heavy_fraction >= 1)
        problems.push_back("es_heavy_fraction must lie in (0, 1)");
    if (sc.sketch.fl_fp_rate <= 0 || sc.sketch.fl_fp_rate >= 1)
        problems.push_back("fl_fp_rate must lie in (0, 1)");

    return problems;
}

std::string scenario_to_json(const Scenario& sc) {
    json root;
    root["name"] = sc.name;
    root["tle_file"] = sc.tle_file;
    root["constellation"] = {{"name", sc.constellation.name},
                             {"planes", sc.constellation.planes},
                             {"sats_per_plane", sc.constellation.sats_per_plane},
                             {"altitude_km", sc.constellation.altitude_km},
                             {"inclination_deg", sc.constellation.inclination_deg},
                             {"phasing", sc.constellation.phasing},
                             {"raan_spread_deg", sc.constellation.raan_spread_deg}};
    json seams = json::array();
    for (auto [a, b] : sc.isl.seam_plane_pairs) seams.push_back(json::array({a, b}));
    root["isl"] = {{"max_terminals", sc.isl.max_terminals},
                   {"seam_enabled", sc.isl.seam_enabled},
                   {"high_latitude_cutoff_deg", sc.isl.high_latitude_cutoff_deg},
                   {"seam_plane_pairs", seams}};
    /* `stations` mirrors what the parser accepts: an explicit list, or the
     * count when the run synthesizes default sites. */
    json stations;
    if (sc.stations.empty()) {
        stations = sc.traffic.n_ter;
    } else {
        stations = json::array();
        for (const auto& st : sc.stations)
            stations.push_back(
                {{"id", st.id}, {"lon", st.longitude_deg}, {"lat", st.latitude_deg}});
    }
    root["traffic"] = {{"offerload", sc.traffic.offerload},
                       {"isl_bandwidth_units", sc.traffic.isl_bandwidth_units},
                       {"diurnal", sc.traffic.diurnal},
                       {"rng_seed", sc.traffic.rng_seed},
                       {"stations", stations}};
    root["epoch_s"] = sc.epoch_s;
    root["horizon_s"] = sc.horizon_s;
    root["seed_period_s"] = sc.seed_period_s;
    root["rng_seed"] = sc.rng_seed;
    root["min_elevation_deg"] = sc.min_elevation_deg;
    root["schemes"] = sc.schemes;
    root["memory_bytes"] = sc.memory_bytes;
    root["re_aggregate"] = sc.re_aggregate;
    root["max_hops_per_epoch"] = sc.max_hops_per_epoch;
    root["control_loss_rate"] = sc.control_loss_rate;
    root["parser_lanes"] = sc.parser_lanes;
    root["seed_cap_factor"] = sc.seed_cap_factor;
    root["sketch_params"] = {{"cm_depth", sc.sketch.cm_depth},
                             {"fl_cm_depth", sc.sketch.fl_cm_depth},
                             {"es_heavy_fraction", sc.sketch.es_heavy_fraction},
                             {"fl_fp_rate", sc.sketch.fl_fp_rate}};
    /* nlohmann::json objects iterate in key order, so dump() is canonical. */
    return root.dump(2);
}

uint64_t scenario_hash(const Scenario& sc) {
    std::string canon = scenario_to_json(sc);
    return fnv1a64(canon.data(), canon.size());
}

}  // namespace cstars::sim
