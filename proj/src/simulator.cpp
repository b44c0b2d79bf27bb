#include "ydof/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ydof/rng.hpp"

namespace ydof::sim {

using scheme::DegenerateChannel;
using scheme::excluded_user;
using scheme::kPairs;

namespace {

struct EffectiveChain {
    // Per pair p: relay-side gain of each direction after projection
    // (coef_a maps u_ab, coef_b maps u_ba; both ~identity by construction).
    std::array<Mat, 3> coef_a;
    std::array<Mat, 3> coef_b;
    // Receiver k: stacked downlink matrix over its incoming pairs and the
    // pair order of the blocks.
    std::array<Mat, 3> rx_stack;
    std::array<std::vector<int>, 3> rx_pairs;
};

EffectiveChain effective_chain(const BeamformingPlan& plan) {
    EffectiveChain ec;
    for (int p = 0; p < 3; ++p) {
        if (plan.alloc.pair_streams(p) == 0) continue;
        const auto [a, b] = kPairs[p];
        ec.coef_a[p] = plan.n_proj[p] * plan.h_bar[a] * plan.v[a][b];
        ec.coef_b[p] = plan.n_proj[p] * plan.h_bar[b] * plan.v[b][a];
    }
    for (int k = 0; k < 3; ++k) {
        for (int p = 0; p < 3; ++p) {
            if (plan.alloc.pair_streams(p) == 0) continue;
            if (kPairs[p].a == k || kPairs[p].b == k) ec.rx_pairs[k].push_back(p);
            else {
                // Pairs not involving k must be invisible to k.
                const double leak = linalg::max_abs(plan.d_bar[k] * plan.t[p]);
                if (leak > 1e-6) {
                    throw DegenerateChannel(
                        "downlink zero-forcing leaks into a third receiver");
                }
            }
        }
        int cols = 0;
        for (int p : ec.rx_pairs[k]) cols += plan.alloc.pair_streams(p);
        Mat stack(plan.d_bar[k].rows(), cols);
        int off = 0;
        for (int p : ec.rx_pairs[k]) {
            const int d = plan.alloc.pair_streams(p);
            stack.middleCols(off, d) = plan.d_bar[k] * plan.t[p];
            off += d;
        }
        ec.rx_stack[k] = std::move(stack);
    }
    return ec;
}

Mat left_inverse(const Mat& m, const char* what) {
    if (m.cols() == 0) return Mat::Zero(0, m.rows());
    const double smin = linalg::min_singular_value(m);
    const double smax = m.norm();
    if (smin <= 1e-10 * std::max(1.0, smax)) {
        throw DegenerateChannel(what);
    }
    return linalg::pseudo_inverse(m);
}

Mat solve_square(const Mat& m, const Mat& rhs, const char* what) {
    const double smin = linalg::min_singular_value(m);
    if (smin <= 1e-10 * std::max(1.0, m.norm())) throw DegenerateChannel(what);
    return m.fullPivLu().solve(rhs);
}

double log2_det_capacity(const Mat& gain, const Mat& noise_cov, double power) {
    // 0.5 * log2 det(I + power * G^T Sigma^{-1} G), via Cholesky for symmetry.
    const int d = static_cast<int>(gain.cols());
    if (d == 0) return 0.0;
    Eigen::LLT<Mat> llt(noise_cov);
    if (llt.info() != Eigen::Success) {
        throw DegenerateChannel("effective noise covariance is singular");
    }
    const Mat whitened = llt.solve(gain);
    const Mat m = Mat::Identity(d, d) + power * gain.transpose() * whitened;
    Eigen::LLT<Mat> mllt(m);
    if (mllt.info() != Eigen::Success) {
        throw DegenerateChannel("capacity matrix is not positive definite");
    }
    double log_det = 0.0;
    const Mat l = mllt.matrixL();
    for (int i = 0; i < d; ++i) log_det += std::log2(l(i, i));
    return log_det;  // 2 * sum(log2 diag(L)) * 0.5
}

/// Per-stream symbol powers and the relay rescaling factor at power p. Each
/// user splits its budget equally over its streams as measured at the
/// antennas, so one power-hungry alignment direction cannot starve the rest.
struct PowerState {
    std::array<std::array<Vec, 3>, 3> symbol_power;  // [from][to], per stream
    double relay_scale = 1.0;
};

PowerState power_state(const BeamformingPlan& plan, const EffectiveChain& ec,
                       double p) {
    PowerState ps;
    const int slots = plan.alloc.slots;
    for (int j = 0; j < 3; ++j) {
        const int streams = plan.alloc.user_streams(j);
        for (int k = 0; k < 3; ++k) {
            if (k == j) continue;
            const Mat& v = plan.v[j][k];
            Vec q = Vec::Zero(v.cols());
            for (int i = 0; i < v.cols(); ++i) {
                const double col_energy = v.col(i).squaredNorm();
                if (col_energy <= 0.0) {
                    throw DegenerateChannel("precoder column has zero energy");
                }
                q(i) = p * slots / (streams * col_energy);
            }
            ps.symbol_power[j][k] = std::move(q);
        }
    }
    double relay_energy = 0.0;
    Mat noise_gain;
    for (int p_idx = 0; p_idx < 3; ++p_idx) {
        if (plan.alloc.pair_streams(p_idx) == 0) continue;
        const auto [a, b] = kPairs[p_idx];
        relay_energy += (plan.t[p_idx] * ec.coef_a[p_idx] *
                         ps.symbol_power[a][b].cwiseSqrt().asDiagonal())
                            .squaredNorm();
        relay_energy += (plan.t[p_idx] * ec.coef_b[p_idx] *
                         ps.symbol_power[b][a].cwiseSqrt().asDiagonal())
                            .squaredNorm();
        const Mat fwd = plan.t[p_idx] * plan.n_proj[p_idx];
        noise_gain = noise_gain.size() == 0 ? fwd : Mat(noise_gain + fwd);
    }
    if (noise_gain.size() > 0) relay_energy += noise_gain.squaredNorm();
    ps.relay_scale =
        relay_energy > 0.0 ? std::sqrt(p * slots / relay_energy) : 1.0;
    return ps;
}

}  // namespace

StreamSymbols zero_symbols(const BeamformingPlan& plan) {
    StreamSymbols sym;
    for (int p = 0; p < 3; ++p) {
        const auto [a, b] = kPairs[p];
        const int d = plan.alloc.pair_streams(p);
        sym.u[a][b] = Vec::Zero(d);
        sym.u[b][a] = Vec::Zero(d);
    }
    return sym;
}

StreamSymbols random_symbols(const BeamformingPlan& plan, std::uint64_t seed) {
    rng::NormalSampler sampler(rng::derive_seed(seed, 0x5eed5));
    StreamSymbols sym = zero_symbols(plan);
    for (int p = 0; p < 3; ++p) {
        const auto [a, b] = kPairs[p];
        const int d = plan.alloc.pair_streams(p);
        sym.u[a][b] = rng::normal_vector(d, sampler);
        sym.u[b][a] = rng::normal_vector(d, sampler);
    }
    return sym;
}

ChainResult run_chain(const BeamformingPlan& plan, const ChannelRealization& ch,
                      const StreamSymbols& sym,
                      std::optional<std::uint64_t> noise_seed) {
    const int slots = plan.alloc.slots;
    const int n_ext = plan.cfg.n * slots;
    const ChannelRealization chx =
        slots == 2 ? channel::extend_channel(ch) : ch;
    const EffectiveChain ec = effective_chain(plan);

    std::optional<rng::NormalSampler> noise;
    if (noise_seed) noise.emplace(rng::derive_seed(*noise_seed, 0x401e));

    // Uplink: physical transmit vectors (zeros on deselected antennas).
    Vec relay_in = Vec::Zero(n_ext);
    for (int j = 0; j < 3; ++j) {
        Vec x = Vec::Zero(plan.cfg.user_antennas(j) * slots);
        for (int k = 0; k < 3; ++k) {
            if (k == j || plan.alloc.pair_streams(scheme::pair_index(j, k)) == 0)
                continue;
            x += plan.full_uplink_precoder(j, k) * sym.u[j][k];
        }
        relay_in += chx.h[j] * x;
    }
    if (noise) relay_in += rng::normal_vector(n_ext, *noise);

    ChainResult res;
    res.relay_observation = plan.relay_rx_reduce * relay_in;

    Vec relay_out = Vec::Zero(plan.reduced.n_bar);
    for (int p = 0; p < 3; ++p) {
        if (plan.alloc.pair_streams(p) == 0) {
            res.w[p] = Vec::Zero(0);
            continue;
        }
        res.w[p] = plan.n_proj[p] * res.relay_observation;
        relay_out += plan.t[p] * res.w[p];
    }
    const Vec relay_tx = plan.relay_tx_embed * relay_out;

    // Downlink: each user listens on its selected antennas.
    for (int k = 0; k < 3; ++k) {
        const auto& sel = plan.reduced.user_antenna_selection[k];
        const int mk = plan.cfg.user_antennas(k);
        Vec y(static_cast<int>(sel.size()) * slots);
        const Vec y_full = chx.d[k] * relay_tx;
        for (int s = 0; s < slots; ++s) {
            for (std::size_t i = 0; i < sel.size(); ++i) {
                y(s * static_cast<int>(sel.size()) + static_cast<int>(i)) =
                    y_full(s * mk + sel[i]);
            }
        }
        if (noise) y += rng::normal_vector(static_cast<int>(y.size()), *noise);
        res.user_rx[k] = std::move(y);
    }

    // Equalize, cancel self-interference, decode.
    for (int k = 0; k < 3; ++k) {
        const Mat eq = left_inverse(ec.rx_stack[k],
                                    "receiver equalizer is singular");
        const Vec w_hat = eq * res.user_rx[k];
        Vec cancelled(w_hat.size());
        int off = 0;
        for (int p : ec.rx_pairs[k]) {
            const int d = plan.alloc.pair_streams(p);
            const auto [a, b] = kPairs[p];
            const Vec block = w_hat.segment(off, d);
            if (k == b) {
                const Vec clean = block - ec.coef_b[p] * sym.u[b][a];
                cancelled.segment(off, d) = clean;
                res.decoded[a][b] = solve_square(
                    ec.coef_a[p], clean, "pair gain is singular");
            } else {
                const Vec clean = block - ec.coef_a[p] * sym.u[a][b];
                cancelled.segment(off, d) = clean;
                res.decoded[b][a] = solve_square(
                    ec.coef_b[p], clean, "pair gain is singular");
            }
            off += d;
        }
        res.post_cancel[k] = std::move(cancelled);
    }
    for (int p = 0; p < 3; ++p) {
        if (plan.alloc.pair_streams(p) > 0) continue;
        const auto [a, b] = kPairs[p];
        res.decoded[a][b] = Vec::Zero(0);
        res.decoded[b][a] = Vec::Zero(0);
    }
    return res;
}

RateReport analytic_rates(const BeamformingPlan& plan,
                          const ChannelRealization& ch,
                          const PowerConfig& power) {
    (void)ch;  // the plan already carries the reduced channel matrices
    if (power.p <= 0.0 || power.noise_variance <= 0.0) {
        throw std::invalid_argument("power and noise variance must be positive");
    }
    const EffectiveChain ec = effective_chain(plan);
    const PowerState ps = power_state(plan, ec, power.p);
    const double nv = power.noise_variance;
    const int slots = plan.alloc.slots;

    RateReport report;
    report.p = power.p;

    for (int k = 0; k < 3; ++k) {
        if (ec.rx_pairs[k].empty()) continue;
        const Mat eq = left_inverse(ec.rx_stack[k],
                                    "receiver equalizer is singular");
        const Mat eq_cov = eq * eq.transpose();  // receiver-noise shaping
        int off = 0;
        for (int p : ec.rx_pairs[k]) {
            const int d = plan.alloc.pair_streams(p);
            const auto [a, b] = kPairs[p];
            const int sender = (k == b) ? a : b;
            const Mat& gain = (k == b) ? ec.coef_a[p] : ec.coef_b[p];

            const double cr2 = ps.relay_scale * ps.relay_scale;
            Mat noise_cov = cr2 * nv *
                                (plan.n_proj[p] * plan.n_proj[p].transpose()) +
                            nv * eq_cov.block(off, off, d, d);
            const Mat scaled_gain =
                ps.relay_scale * gain *
                ps.symbol_power[sender][k].cwiseSqrt().asDiagonal();
            const double rate = log2_det_capacity(scaled_gain, noise_cov, 1.0) /
                                static_cast<double>(slots);
            report.per_message_rate[sender][k] = rate;
            report.sum_rate += rate;
            off += d;
        }
    }
    return report;
}

PowerAudit audit_power(const BeamformingPlan& plan, const ChannelRealization& ch,
                       double p) {
    (void)ch;
    const EffectiveChain ec = effective_chain(plan);
    const PowerState ps = power_state(plan, ec, p);
    const int slots = plan.alloc.slots;

    PowerAudit audit;
    for (int j = 0; j < 3; ++j) {
        double energy = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (k == j) continue;
            const Mat& v = plan.v[j][k];
            for (int i = 0; i < v.cols(); ++i) {
                energy += ps.symbol_power[j][k](i) * v.col(i).squaredNorm();
            }
        }
        audit.user_tx_power[j] = energy / slots;
    }
    double relay_energy = 0.0;
    Mat noise_gain;
    for (int p_idx = 0; p_idx < 3; ++p_idx) {
        if (plan.alloc.pair_streams(p_idx) == 0) continue;
        const auto [a, b] = kPairs[p_idx];
        relay_energy += (plan.t[p_idx] * ec.coef_a[p_idx] *
                         ps.symbol_power[a][b].cwiseSqrt().asDiagonal())
                            .squaredNorm();
        relay_energy += (plan.t[p_idx] * ec.coef_b[p_idx] *
                         ps.symbol_power[b][a].cwiseSqrt().asDiagonal())
                            .squaredNorm();
        const Mat fwd = plan.t[p_idx] * plan.n_proj[p_idx];
        noise_gain = noise_gain.size() == 0 ? fwd : Mat(noise_gain + fwd);
    }
    if (noise_gain.size() > 0) relay_energy += noise_gain.squaredNorm();
    audit.relay_tx_power =
        ps.relay_scale * ps.relay_scale * relay_energy / slots;
    return audit;
}

DofReport estimate_dof(const BeamformingPlan& plan, const ChannelRealization& ch,
                       const std::vector<double>& p_grid) {
    if (p_grid.size() < 2) {
        throw std::invalid_argument("estimate_dof: need at least two powers");
    }
    if (!std::is_sorted(p_grid.begin(), p_grid.end()) ||
        std::adjacent_find(p_grid.begin(), p_grid.end()) != p_grid.end()) {
        throw std::invalid_argument("estimate_dof: powers must be increasing");
    }
    if (p_grid.back() < db_to_power(40.0)) {
        throw std::invalid_argument(
            "estimate_dof: largest power must be at least 40 dB");
    }
    DofReport report;
    report.p_grid = p_grid;
    report.sum_dof = bounds::dof_bounds(plan.cfg).sum_dof;
    for (double p : p_grid) {
        report.sum_rates.push_back(
            analytic_rates(plan, ch, PowerConfig{p, 1.0}).sum_rate);
    }
    const double dlog = 0.5 * std::log2(p_grid.back() / p_grid.front());
    report.estimated_slope =
        (report.sum_rates.back() - report.sum_rates.front()) / dlog;
    return report;
}

MonteCarloStats monte_carlo(const channel::AntennaConfig& cfg, int trials,
                            const std::vector<double>& p_grid,
                            std::uint64_t seed, bool reciprocal) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    MonteCarloStats stats;
    stats.trials = trials;
    stats.sum_dof = bounds::dof_bounds(cfg).sum_dof;
    int validated = 0;
    for (int t = 0; t < trials; ++t) {
        const auto ch =
            channel::sample_channel(cfg, reciprocal, rng::derive_seed(seed, t));
        try {
            const auto plan = scheme::build_plan(cfg, ch);
            if (scheme::all_pass(scheme::validate_plan(plan, ch))) ++validated;
            stats.per_trial_slope.push_back(
                estimate_dof(plan, ch, p_grid).estimated_slope);
        } catch (const DegenerateChannel&) {
            // Probability-zero event for generic channels; counts as a
            // validation failure for this trial.
        }
    }
    stats.validate_pass_rate =
        static_cast<double>(validated) / static_cast<double>(trials);
    if (!stats.per_trial_slope.empty()) {
        const auto [mn, mx] = std::minmax_element(stats.per_trial_slope.begin(),
                                                  stats.per_trial_slope.end());
        stats.min_slope = *mn;
        stats.max_slope = *mx;
        double total = 0.0;
        for (double s : stats.per_trial_slope) total += s;
        stats.mean_slope = total / static_cast<double>(stats.per_trial_slope.size());
    }
    return stats;
}

}  // namespace ydof::sim
