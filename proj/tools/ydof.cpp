// Command-line front end: bound reports, plan validation, SNR sweeps,
// Monte-Carlo campaigns, and antenna-grid batch runs with CSV output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ydof/bounds.hpp"
#include "ydof/channel.hpp"
#include "ydof/rng.hpp"
#include "ydof/scheme.hpp"
#include "ydof/simulator.hpp"

namespace {

using ydof::bounds::binding_case_name;
using ydof::channel::AntennaConfig;

enum class Mode { kBounds, kPlan, kSweep, kMonteCarlo, kGrid };

struct RunConfig {
    std::vector<int> antennas;  // m1, m2, m3, n as given on the command line
    std::vector<double> snr_db = {40.0, 50.0, 60.0};
    int trials = 10;
    std::uint64_t seed = 0;
    bool reciprocal = false;
    Mode mode = Mode::kBounds;
    std::string output_path;
    bool dump_plan = false;
    std::string grid_file;
};

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<double> snr_to_powers(const std::vector<double>& snr_db) {
    std::vector<double> p;
    p.reserve(snr_db.size());
    for (double s : snr_db) p.push_back(ydof::sim::db_to_power(s));
    return p;
}

/// Ordered config plus a note when the input labels were permuted, so
/// reported per-message rates can be mapped back to the caller's labels.
AntennaConfig ordered_config(const RunConfig& rc) {
    auto [cfg, perm] =
        ydof::channel::validate_and_order(rc.antennas[0], rc.antennas[1],
                                          rc.antennas[2], rc.antennas[3]);
    if (perm != ydof::channel::UserPermutation{0, 1, 2}) {
        std::cerr << "note: users relabeled so that m1 >= m2 >= m3:";
        for (int e = 0; e < 3; ++e) {
            std::cerr << " input user " << e + 1 << " -> user " << perm[e] + 1;
            if (e < 2) std::cerr << ",";
        }
        std::cerr << "\n";
    }
    return cfg;
}

class OutputWriter {
  public:
    explicit OutputWriter(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::ios_base::failure("cannot open " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (file_.is_open() && !file_) {
            throw std::ios_base::failure("write failed");
        }
    }

  private:
    std::ofstream file_;
};

int run_bounds(const RunConfig& rc) {
    const AntennaConfig cfg = ordered_config(rc);
    const auto b = ydof::bounds::dof_bounds(cfg);
    OutputWriter out(rc.output_path);
    out.stream() << "antennas m1=" << cfg.m1 << " m2=" << cfg.m2
                 << " m3=" << cfg.m3 << " n=" << cfg.n << "\n"
                 << "sum_dof=" << b.sum_dof
                 << " case=" << binding_case_name(b.binding_case) << "\n"
                 << "cutset_user1=" << b.cutset_per_user[0]
                 << " cutset_user2=" << b.cutset_per_user[1]
                 << " cutset_user3=" << b.cutset_per_user[2]
                 << " cutset_sum=" << b.cutset_sum << "\n"
                 << "genie_sum=" << b.genie_sum << "\n";
    out.finish();
    return kExitOk;
}

nlohmann::json plan_to_json(const ydof::scheme::BeamformingPlan& plan,
                            const std::vector<ydof::scheme::PlanCheck>& checks) {
    nlohmann::json j;
    j["antennas"] = {plan.cfg.m1, plan.cfg.m2, plan.cfg.m3, plan.cfg.n};
    j["binding_case"] = binding_case_name(plan.reduced.binding_case);
    j["effective_case"] = binding_case_name(plan.reduced.effective_case);
    j["slots"] = plan.alloc.slots;
    j["n_bar"] = plan.reduced.n_bar;
    j["m_bar"] = plan.reduced.m_bar;
    j["relay_projection"] = plan.reduced.relay_projection;
    j["streams"] = {{"d12", plan.alloc.d12},
                    {"d13", plan.alloc.d13},
                    {"d23", plan.alloc.d23}};
    j["uplink_power_scale"] = plan.uplink_power_scale;
    j["relay_power_scale"] = plan.relay_power_scale;
    for (int p = 0; p < 3; ++p) {
        if (plan.alloc.pair_streams(p) == 0) continue;
        const auto [a, b] = ydof::scheme::kPairs[p];
        const std::string tag = std::to_string(a + 1) + std::to_string(b + 1);
        j["matrix_dims"]["v" + tag] = {plan.v[a][b].rows(), plan.v[a][b].cols()};
        j["matrix_dims"]["v" + std::to_string(b + 1) + std::to_string(a + 1)] = {
            plan.v[b][a].rows(), plan.v[b][a].cols()};
        j["matrix_dims"]["n" + tag] = {plan.n_proj[p].rows(),
                                       plan.n_proj[p].cols()};
        j["matrix_dims"]["t" + tag] = {plan.t[p].rows(), plan.t[p].cols()};
    }
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"residual", c.residual},
                               {"tolerance", c.tolerance},
                               {"pass", c.pass}});
    }
    return j;
}

int run_plan(const RunConfig& rc) {
    const AntennaConfig cfg = ordered_config(rc);
    const auto ch = ydof::channel::sample_channel(cfg, rc.reciprocal, rc.seed);
    const auto plan = ydof::scheme::build_plan(cfg, ch);
    const auto checks = ydof::scheme::validate_plan(plan, ch);

    OutputWriter out(rc.output_path);
    if (rc.dump_plan) {
        out.stream() << plan_to_json(plan, checks).dump(2) << "\n";
    } else {
        out.stream() << "case=" << binding_case_name(plan.reduced.effective_case)
                     << " slots=" << plan.alloc.slots
                     << " n_bar=" << plan.reduced.n_bar << " d12="
                     << plan.alloc.d12 << " d13=" << plan.alloc.d13
                     << " d23=" << plan.alloc.d23 << "\n";
        for (const auto& c : checks) {
            out.stream() << (c.pass ? "PASS" : "FAIL") << " " << c.name
                         << " residual=" << c.residual
                         << " tolerance=" << c.tolerance << "\n";
        }
    }
    out.finish();
    return ydof::scheme::all_pass(checks) ? kExitOk : kExitCheckFailed;
}

int run_sweep(const RunConfig& rc) {
    const AntennaConfig cfg = ordered_config(rc);
    const auto powers = snr_to_powers(rc.snr_db);
    OutputWriter out(rc.output_path);
    out.stream() << "trial,snr_db,r12,r13,r21,r23,r31,r32,sum_rate\n";

    bool all_valid = true;
    double slope_total = 0.0;
    for (int t = 0; t < rc.trials; ++t) {
        const auto ch = ydof::channel::sample_channel(
            cfg, rc.reciprocal, ydof::rng::derive_seed(rc.seed, t));
        const auto plan = ydof::scheme::build_plan(cfg, ch);
        all_valid = all_valid &&
                    ydof::scheme::all_pass(ydof::scheme::validate_plan(plan, ch));
        for (std::size_t i = 0; i < powers.size(); ++i) {
            const auto rr = ydof::sim::analytic_rates(
                plan, ch, ydof::channel::PowerConfig{powers[i], 1.0});
            out.stream() << t << "," << fmt(rc.snr_db[i]) << ","
                         << fmt(rr.per_message_rate[0][1]) << ","
                         << fmt(rr.per_message_rate[0][2]) << ","
                         << fmt(rr.per_message_rate[1][0]) << ","
                         << fmt(rr.per_message_rate[1][2]) << ","
                         << fmt(rr.per_message_rate[2][0]) << ","
                         << fmt(rr.per_message_rate[2][1]) << ","
                         << fmt(rr.sum_rate) << "\n";
        }
        slope_total += ydof::sim::estimate_dof(plan, ch, powers).estimated_slope;
    }
    out.stream() << "# estimated_slope," << fmt(slope_total / rc.trials) << "\n";
    out.finish();
    return all_valid ? kExitOk : kExitCheckFailed;
}

bool slope_within_bounds(const ydof::sim::MonteCarloStats& stats) {
    const double target = stats.sum_dof;
    return stats.validate_pass_rate == 1.0 &&
           std::abs(stats.mean_slope - target) <= 0.15 &&
           stats.min_slope >= target - 0.2 && stats.max_slope <= target + 0.15;
}

int run_montecarlo(const RunConfig& rc) {
    const AntennaConfig cfg = ordered_config(rc);
    const auto stats = ydof::sim::monte_carlo(cfg, rc.trials,
                                              snr_to_powers(rc.snr_db), rc.seed,
                                              rc.reciprocal);
    OutputWriter out(rc.output_path);
    out.stream() << "antennas m1=" << cfg.m1 << " m2=" << cfg.m2
                 << " m3=" << cfg.m3 << " n=" << cfg.n
                 << " trials=" << stats.trials << " seed=" << rc.seed
                 << " reciprocal=" << (rc.reciprocal ? 1 : 0) << "\n"
                 << "sum_dof=" << stats.sum_dof << "\n"
                 << "slope_mean=" << fmt(stats.mean_slope)
                 << " slope_min=" << fmt(stats.min_slope)
                 << " slope_max=" << fmt(stats.max_slope) << "\n"
                 << "validate_pass_rate=" << fmt(stats.validate_pass_rate) << "\n";
    out.finish();
    return slope_within_bounds(stats) ? kExitOk : kExitCheckFailed;
}

int run_grid(const RunConfig& rc) {
    std::ifstream in(rc.grid_file);
    if (!in) {
        std::cerr << "error: cannot open grid file " << rc.grid_file << "\n";
        return kExitIo;
    }
    OutputWriter out(rc.output_path);
    out.stream()
        << "m1,m2,m3,n,sum_dof,case,slope_mean,slope_min,slope_max,pass\n";

    bool all_ok = true;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        int m1, m2, m3, n;
        if (!(row >> m1 >> m2 >> m3 >> n)) continue;  // blank or comment line
        auto [cfg, perm] = ydof::channel::validate_and_order(m1, m2, m3, n);
        (void)perm;
        const auto stats = ydof::sim::monte_carlo(
            cfg, rc.trials, snr_to_powers(rc.snr_db), rc.seed, rc.reciprocal);
        const bool ok = slope_within_bounds(stats);
        all_ok = all_ok && ok;
        out.stream() << cfg.m1 << "," << cfg.m2 << "," << cfg.m3 << "," << cfg.n
                     << "," << stats.sum_dof << ","
                     << binding_case_name(
                            ydof::bounds::dof_bounds(cfg).binding_case)
                     << "," << fmt(stats.mean_slope) << ","
                     << fmt(stats.min_slope) << "," << fmt(stats.max_slope)
                     << "," << (ok ? "pass" : "fail") << "\n";
    }
    out.finish();
    return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig rc;
    CLI::App app{
        "Degrees-of-freedom simulator for the 3-user MIMO Y-channel.\n"
        "snr_db is 10*log10(P); the noise variance is fixed at 1."};
    app.add_option("--antennas", rc.antennas,
                   "Antenna counts M1,M2,M3,N (any user order)")
        ->delimiter(',')
        ->expected(4);
    app.add_option("--snr-db", rc.snr_db,
                   "SNR sweep grid in dB (default 40,50,60)")
        ->delimiter(',');
    app.add_option("--trials", rc.trials, "Monte-Carlo trials (default 10)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", rc.seed, "Base RNG seed (default 0)");
    app.add_flag("--reciprocal", rc.reciprocal,
                 "Downlink channels are transposes of the uplinks");
    std::map<std::string, Mode> mode_names{{"bounds", Mode::kBounds},
                                           {"plan", Mode::kPlan},
                                           {"sweep", Mode::kSweep},
                                           {"montecarlo", Mode::kMonteCarlo},
                                           {"grid", Mode::kGrid}};
    app.add_option("--mode", rc.mode, "bounds|plan|sweep|montecarlo|grid")
        ->transform(CLI::CheckedTransformer(mode_names, CLI::ignore_case));
    app.add_option("--out", rc.output_path, "Output file (default stdout)");
    app.add_flag("--dump-plan", rc.dump_plan,
                 "Plan mode: dump matrices/residuals as JSON");
    app.add_option("--grid-file", rc.grid_file,
                   "Grid mode: file of M1,M2,M3,N tuples, # comments allowed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return kExitUsage;
    }

    if (rc.mode == Mode::kGrid) {
        if (rc.grid_file.empty()) {
            std::cerr << "error: --mode grid requires --grid-file\n";
            return kExitUsage;
        }
    } else if (rc.antennas.size() != 4) {
        std::cerr << "error: --antennas M1,M2,M3,N is required\n";
        return kExitUsage;
    }
    const bool sweeps = rc.mode == Mode::kSweep || rc.mode == Mode::kMonteCarlo ||
                        rc.mode == Mode::kGrid;
    if (sweeps && (rc.snr_db.size() < 2 ||
                   !std::is_sorted(rc.snr_db.begin(), rc.snr_db.end()) ||
                   std::adjacent_find(rc.snr_db.begin(), rc.snr_db.end()) !=
                       rc.snr_db.end())) {
        std::cerr << "error: --snr-db must be a strictly increasing list of at "
                     "least two values\n";
        return kExitUsage;
    }

    try {
        switch (rc.mode) {
            case Mode::kBounds: return run_bounds(rc);
            case Mode::kPlan: return run_plan(rc);
            case Mode::kSweep: return run_sweep(rc);
            case Mode::kMonteCarlo: return run_montecarlo(rc);
            case Mode::kGrid: return run_grid(rc);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ydof::scheme::DegenerateChannel& e) {
        std::cerr << "degenerate channel: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
