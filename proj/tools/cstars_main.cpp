// Command-line front end: validate configs, run single scenarios, and run
// memory x seed sweeps with a bounded worker pool.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "cstars/baselines.hpp"
#include "cstars/harness.hpp"
#include "cstars/io.hpp"
#include "cstars/metrics.hpp"
#include "cstars/orbit.hpp"
#include "cstars/scenario.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
    std::vector<std::string> schemes;
    std::vector<uint64_t> memory;
    std::vector<uint64_t> seeds;
    double epoch_s = -1.0;
    double seed_period_s = -1.0;
};

/* Applies the shared flag overrides to a loaded scenario. A single --memory
 * value rebudgets every enabled scheme; --seeds takes the first entry for a
 * plain run. */
cstars::sim::Scenario with_overrides(cstars::sim::Scenario sc, const Overrides& ov) {
    if (!ov.schemes.empty()) sc.schemes = ov.schemes;
    if (!ov.memory.empty())
        for (const auto& s : sc.schemes) sc.memory_bytes[s] = ov.memory.front();
    if (!ov.seeds.empty()) sc.rng_seed = ov.seeds.front();
    if (ov.epoch_s > 0.0) sc.epoch_s = ov.epoch_s;
    if (ov.seed_period_s > 0.0) sc.seed_period_s = ov.seed_period_s;
    auto problems = cstars::sim::validate_scenario(sc);
    if (!problems.empty()) {
        std::string msg = "overridden scenario is invalid:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw cstars::sim::ConfigError(msg);
    }
    return sc;
}

int cmd_validate(const std::string& config_path) {
    cstars::sim::Scenario sc = cstars::sim::load_scenario(config_path);
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(cstars::sim::scenario_hash(sc)));
    std::cout << "ok: " << config_path << "\n"
              << "  name: " << sc.name << "\n"
              << "  satellites: " << sc.constellation.total() << "\n"
              << "  epochs: " << sc.epochs() << " (period every " << sc.epochs_per_period()
              << ")\n"
              << "  schemes:";
    for (const auto& s : sc.schemes) std::cout << ' ' << s << '=' << sc.scheme_memory(s) << "B";
    std::cout << "\n  hash: " << hash << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& ov) {
    cstars::sim::Scenario sc = with_overrides(cstars::sim::load_scenario(config_path), ov);
    cstars::sim::RunOptions opt;
    opt.out_dir = out_dir;
    cstars::sim::RunResult res = cstars::sim::run(sc, opt);

    std::cout << "run complete: " << sc.name << "\n"
              << "  packets: " << res.generated_packets << " generated, " << res.delivered_packets
              << " delivered, " << res.dropped_packets << " dropped\n"
              << "  distinct flows: " << res.distinct_flows << "\n"
              << "  max modulus: " << res.max_modulus << " (ratio "
              << res.max_modulus_ratio << ")\n"
              << "  wall: " << res.wall_seconds << " s\n";
    if (!out_dir.empty()) std::cout << "  out: " << out_dir << "\n";
    for (const auto& row : res.rows)
        if (row.epoch < 0)
            std::cout << "  " << row.scheme << ": are=" << row.are << " wmre=" << row.wmre
                      << " re=" << row.re << "\n";
    return kExitOk;
}

struct SweepCellSpec {
    uint64_t memory = 0;
    uint64_t seed = 0;
    std::string dir;
};

/* One sweep cell: an isolated deterministic run. A cell whose manifest is
 * already marked complete for the same scenario hash is reloaded from its
 * report instead of re-run, which makes interrupted sweeps resumable. */
std::vector<cstars::metrics::MetricRow> run_cell(const cstars::sim::Scenario& base,
                                                 const SweepCellSpec& cell) {
    cstars::sim::Scenario sc = base;
    sc.rng_seed = cell.seed;
    for (const auto& s : sc.schemes) sc.memory_bytes[s] = cell.memory;

    std::string manifest_path = cell.dir + "/manifest.json";
    std::string report_path = cell.dir + "/report.csv";
    if (cstars::io::file_exists(manifest_path) && cstars::io::file_exists(report_path)) {
        auto m = nlohmann::json::parse(cstars::io::read_file(manifest_path));
        if (m.value("complete", false) &&
            m.value("scenario_hash", uint64_t{0}) == cstars::sim::scenario_hash(sc))
            return cstars::metrics::parse_report_csv(cstars::io::read_file(report_path));
    }

    cstars::sim::RunOptions opt;
    opt.out_dir = cell.dir;
    opt.write_topology = false;
    opt.write_seeds = false;
    opt.write_truth = false;
    opt.write_estimates = false;
    return cstars::sim::run(sc, opt).rows;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, const Overrides& ov,
              unsigned jobs) {
    if (ov.memory.empty()) throw cstars::sim::ConfigError("sweep needs --memory values");
    cstars::sim::Scenario base = cstars::sim::load_scenario(config_path);
    if (!ov.schemes.empty()) base.schemes = ov.schemes;
    if (ov.epoch_s > 0.0) base.epoch_s = ov.epoch_s;
    if (ov.seed_period_s > 0.0) base.seed_period_s = ov.seed_period_s;
    std::vector<uint64_t> seeds = ov.seeds.empty() ? std::vector<uint64_t>{base.rng_seed}
                                                   : ov.seeds;

    {
        // Budget/shape errors should surface before any worker starts.
        cstars::sim::Scenario probe = base;
        probe.rng_seed = seeds.front();
        for (const auto& s : probe.schemes) probe.memory_bytes[s] = ov.memory.front();
        auto problems = cstars::sim::validate_scenario(probe);
        if (!problems.empty()) {
            std::string msg = "sweep scenario is invalid:";
            for (const auto& p : problems) msg += "\n  - " + p;
            throw cstars::sim::ConfigError(msg);
        }
    }

    std::vector<SweepCellSpec> cells;
    for (uint64_t m : ov.memory)
        for (uint64_t s : seeds)
            cells.push_back({m, s,
                             out_dir + "/cells/mem" + std::to_string(m) + "_seed" +
                                 std::to_string(s)});

    if (jobs == 0) jobs = std::thread::hardware_concurrency();
    if (jobs == 0) jobs = 1;
    if (jobs > cells.size()) jobs = static_cast<unsigned>(cells.size());

    std::atomic<size_t> next{0};
    std::mutex mu;
    std::vector<cstars::metrics::MetricRow> rows;
    std::vector<std::string> failures;

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                auto cell_rows = run_cell(base, cells[i]);
                std::lock_guard<std::mutex> lk(mu);
                rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(mu);
                failures.push_back(cells[i].dir + ": " + e.what());
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (!failures.empty()) {
        std::cerr << "sweep failed in " << failures.size() << " cell(s):\n";
        for (const auto& f : failures) std::cerr << "  " << f << "\n";
        return kExitRuntime;
    }

    std::vector<std::pair<std::string, uint64_t>> grid;
    for (const auto& s : base.schemes)
        for (uint64_t m : ov.memory) grid.emplace_back(s, m);
    auto table = cstars::metrics::sweep_aggregate(rows, grid);
    cstars::io::write_file(out_dir + "/sweep.csv", cstars::metrics::format_sweep_csv(table));

    std::cout << "sweep complete: " << cells.size() << " cells, " << table.size()
              << " aggregated rows\n  out: " << out_dir << "/sweep.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic LEO constellation traffic measurement simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    Overrides ov;
    unsigned jobs = 0;

    auto add_shared = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", config_path, "scenario config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        auto* out = cmd->add_option("--out", out_dir, "output directory");
        if (needs_out) out->required();
        cmd->add_option("--schemes", ov.schemes, "schemes to run (subset of cs,cm,es,fl)")
            ->delimiter(',');
        cmd->add_option("--memory", ov.memory, "per-satellite budget override, bytes")
            ->delimiter(',');
        cmd->add_option("--seeds", ov.seeds, "rng seed(s)")->delimiter(',');
        cmd->add_option("--epoch-s", ov.epoch_s, "epoch length override, seconds");
        cmd->add_option("--seed-period", ov.seed_period_s,
                        "seed distribution period override, seconds");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a config without running");
    validate->add_option("--config", config_path, "scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    add_shared(run, false);

    CLI::App* sweep = app.add_subcommand("sweep", "run a memory x seed grid");
    add_shared(sweep, true);
    sweep->add_option("--jobs", jobs, "worker pool size (default: hardware threads)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (run->parsed()) return cmd_run(config_path, out_dir, ov);
        return cmd_sweep(config_path, out_dir, ov, jobs);
    } catch (const cstars::sim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cstars::baseline::BudgetError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cstars::orbit::TleError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cstars::io::IoError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
