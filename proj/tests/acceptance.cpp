// Acceptance suite: executes every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "ydof/bounds.hpp"
#include "ydof/channel.hpp"
#include "ydof/rng.hpp"
#include "ydof/scheme.hpp"
#include "ydof/simulator.hpp"

using namespace ydof;
using channel::AntennaConfig;
using channel::sample_channel;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    bool pass = true;
    std::ostringstream detail;
    double elapsed_ms = 0.0;
};

int failures = 0;

void report(int number, const std::string& title, const Criterion& c) {
    std::printf("[%s] criterion %d: %s (%.1f ms)%s%s\n",
                c.pass ? "PASS" : "FAIL", number, title.c_str(), c.elapsed_ms,
                c.detail.str().empty() ? "" : " -- ",
                c.detail.str().c_str());
    if (!c.pass) ++failures;
}

template <typename F>
Criterion timed(double budget_ms, F&& body) {
    Criterion c;
    const auto start = Clock::now();
    body(c);
    c.elapsed_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (c.elapsed_ms >= budget_ms) {
        c.pass = false;
        c.detail << " over time budget " << budget_ms << " ms";
    }
    return c;
}

const std::vector<double> kGrid = {sim::db_to_power(40.0),
                                   sim::db_to_power(50.0),
                                   sim::db_to_power(60.0)};

void criterion_1() {
    auto c = timed(1.0, [](Criterion& c) {
        const auto a = bounds::dof_bounds(AntennaConfig{3, 2, 1, 3});
        const auto b = bounds::dof_bounds(AntennaConfig{2, 2, 2, 3});
        if (a.sum_dof != 6 || b.sum_dof != 6) {
            c.pass = false;
            c.detail << "got " << a.sum_dof << " and " << b.sum_dof;
        }
    });
    report(1, "sum-DoF formula fixtures (3,2,1,3) -> 6 and (2,2,2,3) -> 6", c);
}

void criterion_2() {
    auto c = timed(1000.0, [](Criterion& c) {
        int checked = 0;
        for (int m1 = 1; m1 <= 6; ++m1)
            for (int m2 = 1; m2 <= m1; ++m2)
                for (int m3 = 1; m3 <= m2; ++m3)
                    for (int n = 1; n <= 9; ++n) {
                        const AntennaConfig cfg{m1, m2, m3, n};
                        const auto b = bounds::dof_bounds(cfg);
                        const int direct = std::min(
                            {2 * m2 + 2 * m3, m1 + m2 + m3, 2 * n});
                        if (b.sum_dof != direct ||
                            b.sum_dof > b.cutset_sum ||
                            b.sum_dof > b.genie_sum) {
                            c.pass = false;
                            c.detail << "mismatch at (" << m1 << "," << m2
                                     << "," << m3 << "," << n << ")";
                            return;
                        }
                        ++checked;
                    }
        c.detail << checked << " configs";
    });
    report(2, "bound dominance over the full antenna grid", c);
}

void criterion_3() {
    auto c = timed(10000.0, [](Criterion& c) {
        const AntennaConfig fixtures[] = {
            {3, 2, 1, 3}, {2, 2, 2, 3}, {2, 2, 1, 3}, {3, 3, 3, 2}};
        double worst = 0.0;
        for (const auto& cfg : fixtures) {
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                const auto ch = sample_channel(cfg, false, 1000 + seed);
                const auto plan = scheme::build_plan(cfg, ch);
                const auto sym = sim::random_symbols(plan, seed);
                const auto res = sim::run_chain(plan, ch, sym, std::nullopt);
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) {
                        if (j == k || sym.u[j][k].size() == 0) continue;
                        worst = std::max(
                            worst, (res.decoded[j][k] - sym.u[j][k])
                                       .cwiseAbs()
                                       .maxCoeff());
                    }
            }
        }
        c.detail << "max abs decode error " << worst;
        if (worst > 1e-6) c.pass = false;
    });
    report(3, "noiseless round trip over 50 channels per case", c);
}

void criterion_4() {
    auto c = timed(30000.0, [](Criterion& c) {
        rng::NormalSampler pick(0xacce97);
        int bucket_a = 0, bucket_b1 = 0, bucket_b2 = 0, bucket_c = 0;
        int draws = 0;
        double worst_span = 0.0, worst_zf = 0.0;
        std::uint64_t channel_seed = 50000;
        while (draws < 200) {
            const int m1 = 1 + static_cast<int>(pick.uniform() * 6);
            const int m2 = 1 + static_cast<int>(pick.uniform() * m1);
            const int m3 = 1 + static_cast<int>(pick.uniform() * m2);
            const int n = 1 + static_cast<int>(pick.uniform() * 9);
            const AntennaConfig cfg{m1, m2, m3, n};
            const auto [alloc, red] = scheme::allocate_streams(cfg);
            // keep drawing until every case shape has at least 15 draws
            int* bucket = nullptr;
            if (red.binding_case == bounds::BindingCase::C) bucket = &bucket_c;
            else if (red.effective_case == bounds::BindingCase::A) bucket = &bucket_a;
            else bucket = (alloc.slots == 2) ? &bucket_b2 : &bucket_b1;
            const int remaining = 200 - draws;
            const int deficit = std::max(0, 15 - bucket_a) +
                                std::max(0, 15 - bucket_b1) +
                                std::max(0, 15 - bucket_b2) +
                                std::max(0, 15 - bucket_c);
            if (*bucket >= 15 && remaining <= deficit) continue;
            ++*bucket;
            ++draws;

            const auto ch = sample_channel(cfg, false, channel_seed++);
            const auto plan = scheme::build_plan(cfg, ch);
            const auto checks = scheme::validate_plan(plan, ch);
            for (const auto& chk : checks) {
                if (!chk.pass) {
                    c.pass = false;
                    c.detail << "failed " << chk.name << " at (" << m1 << ","
                             << m2 << "," << m3 << "," << n << ")";
                    return;
                }
                if (chk.name.rfind("span_alignment", 0) == 0)
                    worst_span = std::max(worst_span, chk.residual);
                if (chk.name.find("zero_forcing") != std::string::npos)
                    worst_zf = std::max(worst_zf, chk.residual);
            }
        }
        c.detail << "cases A/B/B2/C = " << bucket_a << "/" << bucket_b1 << "/"
                 << bucket_b2 << "/" << bucket_c << ", worst span residual "
                 << worst_span << ", worst zero-forcing residual " << worst_zf;
        if (worst_span > 1e-8 || worst_zf > 1e-9) c.pass = false;
    });
    report(4, "plan invariants on 200 random config/channel draws", c);
}

struct SlopeCampaign {
    bool converse_ok = true;
    double worst_converse_excess = 0.0;
};

void criterion_5_and_6() {
    SlopeCampaign campaign;
    struct Fixture {
        AntennaConfig cfg;
        double target;
    };
    const Fixture fixtures[] = {{{3, 2, 1, 3}, 6.0},
                                {{2, 2, 2, 3}, 6.0},
                                {{3, 3, 3, 2}, 4.0},
                                {{2, 2, 1, 3}, 5.0}};
    auto c5 = timed(60000.0, [&campaign, &fixtures](Criterion& c) {
        for (const auto& f : fixtures) {
            const auto stats = sim::monte_carlo(f.cfg, 20, kGrid, 0xd0f, false);
            if (stats.per_trial_slope.size() != 20) {
                c.pass = false;
                c.detail << "degenerate trial in (" << f.cfg.m1 << ","
                         << f.cfg.m2 << "," << f.cfg.m3 << "," << f.cfg.n << ")";
                return;
            }
            for (double s : stats.per_trial_slope) {
                if (s > f.target + 0.15) {
                    campaign.converse_ok = false;
                    campaign.worst_converse_excess =
                        std::max(campaign.worst_converse_excess, s - f.target);
                }
            }
            c.detail << "(" << f.cfg.m1 << "," << f.cfg.m2 << "," << f.cfg.m3
                     << "," << f.cfg.n << ") mean " << stats.mean_slope
                     << " min " << stats.min_slope << "; ";
            if (std::abs(stats.mean_slope - f.target) > 0.15 ||
                stats.min_slope < f.target - 0.2) {
                c.pass = false;
            }
        }
    });
    report(5, "measured DoF slopes in the 40-60 dB window, 20 trials per fixture",
           c5);
    if (!c5.pass) {
        // Context for the failure: the same statistic deep in the high-SNR
        // regime, where the heavy-tailed conditioning of real Gaussian
        // channels no longer dominates the window.
        std::printf("       info: 80-120 dB window:");
        for (const auto& f : fixtures) {
            const auto high = sim::monte_carlo(
                f.cfg, 20,
                {sim::db_to_power(80.0), sim::db_to_power(100.0),
                 sim::db_to_power(120.0)},
                0xd0f, false);
            std::printf(" (%d,%d,%d,%d) mean %.4f min %.3f;", f.cfg.m1,
                        f.cfg.m2, f.cfg.m3, f.cfg.n, high.mean_slope,
                        high.min_slope);
        }
        std::printf("\n");
    }

    Criterion c6;
    c6.pass = campaign.converse_ok;
    c6.elapsed_ms = 0.0;
    if (!campaign.converse_ok) {
        c6.detail << "slope exceeded the bound by "
                  << campaign.worst_converse_excess;
    }
    report(6, "no trial slope exceeds the sum-DoF bound + 0.15", c6);
}

void criterion_7() {
    auto c = timed(5000.0, [](Criterion& c) {
        rng::NormalSampler shape(0x7e57);
        double worst_penrose = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            const int rows = 1 + static_cast<int>(shape.uniform() * 12);
            const int cols = 1 + static_cast<int>(shape.uniform() * 12);
            rng::NormalSampler entries(rng::derive_seed(0x11a16, trial));
            const linalg::Mat a = rng::normal_matrix(rows, cols, entries);
            const int r = linalg::rank(a);
            if (r + linalg::null_space(a).dim() != cols) {
                c.pass = false;
                c.detail << "dimension theorem failed at trial " << trial;
                return;
            }
            worst_penrose = std::max(
                worst_penrose,
                oracles::penrose_residual(a, linalg::pseudo_inverse(a)));

            const linalg::Mat b = rng::normal_matrix(
                rows, 1 + static_cast<int>(shape.uniform() * 12), entries);
            linalg::Mat ab(rows, a.cols() + b.cols());
            ab << a, b;
            const int expected =
                linalg::rank(a) + linalg::rank(b) - linalg::rank(ab);
            if (linalg::column_space_intersection(a, b).dim() != expected) {
                c.pass = false;
                c.detail << "intersection dimension failed at trial " << trial;
                return;
            }
        }
        c.detail << "worst Penrose residual " << worst_penrose;
        if (worst_penrose > 1e-8) c.pass = false;
    });
    report(7, "matrix-primitive properties on 500 random matrices", c);
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8() {
    auto c = timed(30000.0, [](Criterion& c) {
        const char* bin = std::getenv("YDOF_BIN");
        if (bin == nullptr) {
            c.pass = false;
            c.detail << "YDOF_BIN not set";
            return;
        }
        const std::string base = std::string(bin) +
                                 " --antennas 3,2,1,3 --mode sweep --trials 4 "
                                 "--seed 7 --out ";
        const std::string out_a = "/tmp/ydof_accept_a.csv";
        const std::string out_b = "/tmp/ydof_accept_b.csv";
        if (shell(base + out_a) != 0 || shell(base + out_b) != 0) {
            c.pass = false;
            c.detail << "CLI invocation failed";
            return;
        }
        const std::string a = slurp(out_a);
        const std::string b = slurp(out_b);
        std::remove(out_a.c_str());
        std::remove(out_b.c_str());
        if (a.empty() || a != b) {
            c.pass = false;
            c.detail << "outputs differ or are empty";
            return;
        }
        c.detail << a.size() << " identical bytes";
    });
    report(8, "identical seeded CLI invocations give byte-identical CSV", c);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5_and_6();
    criterion_7();
    criterion_8();
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
