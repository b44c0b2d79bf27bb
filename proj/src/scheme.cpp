#include "ydof/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ydof/rng.hpp"

namespace ydof::scheme {

namespace {

using linalg::SubspaceBasis;

// Fixed stream for the two-slot relay projection; one generic draw works for
// almost every channel realization and keeps plans reproducible.
constexpr std::uint64_t kRelayProjectionSeed = 0x9db0f1a5c3e7ULL;

Mat orthonormal_rows(const Mat& m) {
    Eigen::HouseholderQR<Mat> qr(m.transpose());
    Mat q = qr.householderQ() * Mat::Identity(m.cols(), m.rows());
    return q.transpose();
}

Mat orthonormal_cols(const Mat& m) {
    Eigen::HouseholderQR<Mat> qr(m);
    return qr.householderQ() * Mat::Identity(m.rows(), m.cols());
}

std::vector<int> iota_indices(int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

// Stream allocation for a config whose binding case is A or B (possibly a
// case-C reduced config).
void allocate_ab(const AntennaConfig& cfg, bounds::BindingCase effective,
                 DofAllocation& alloc, ReducedConfig& red) {
    red.effective_case = effective;
    if (effective == bounds::BindingCase::A) {
        alloc.slots = 1;
        alloc.d12 = cfg.m2;
        alloc.d13 = cfg.m3;
        alloc.d23 = 0;
        red.n_bar = cfg.m2 + cfg.m3;
        red.relay_projection = false;
    } else {
        const int sum = cfg.m1 + cfg.m2 + cfg.m3;
        alloc.slots = (sum % 2 == 0) ? 1 : 2;
        alloc.d12 = (cfg.m1 + cfg.m2 - cfg.m3) * alloc.slots / 2;
        alloc.d13 = (cfg.m1 + cfg.m3 - cfg.m2) * alloc.slots / 2;
        alloc.d23 = (cfg.m2 + cfg.m3 - cfg.m1) * alloc.slots / 2;
        red.n_bar = sum * alloc.slots / 2;
        // Selecting (antenna, slot) pairs of the extended block-diagonal
        // channel cannot make all three zero-forcing geometries generic at
        // once; a generic projection of the 2n extended dimensions can.
        red.relay_projection = (alloc.slots == 2);
    }
    red.relay_antenna_selection =
        red.relay_projection ? std::vector<int>{} : iota_indices(red.n_bar);
}

// Lexicographically largest reduced antenna triple for case C. Prefers
// strictly positive counts; allows shutting user 3 off entirely when the
// reduction equation has no positive solution (only possible for tiny n).
std::array<int, 3> case_c_reduction(const AntennaConfig& cfg) {
    const int target = 2 * cfg.n;
    for (int a = cfg.m1; a >= 1; --a) {
        for (int b = std::min(cfg.m2, a); b >= 1; --b) {
            for (int c = std::min(cfg.m3, b); c >= 1; --c) {
                if (std::min(2 * (b + c), a + b + c) == target) return {a, b, c};
            }
        }
    }
    for (int a = cfg.m1; a >= 1; --a) {
        for (int b = std::min(cfg.m2, a); b >= 1; --b) {
            if (std::min(2 * b, a + b) == target) return {a, b, 0};
        }
    }
    throw std::logic_error("case C reduction: no feasible antenna subset");
}

void check_realization_matches(const AntennaConfig& cfg,
                               const ChannelRealization& ch) {
    if (ch.extension_factor != 1) {
        throw std::invalid_argument(
            "build_plan expects an unextended realization");
    }
    for (int j = 0; j < 3; ++j) {
        if (ch.h[j].rows() != cfg.n || ch.h[j].cols() != cfg.user_antennas(j) ||
            ch.d[j].rows() != cfg.user_antennas(j) || ch.d[j].cols() != cfg.n) {
            throw std::invalid_argument("realization does not match config");
        }
    }
}

}  // namespace

int pair_index(int j, int k) {
    const int lo = std::min(j, k);
    const int hi = std::max(j, k);
    if (lo == 0 && hi == 1) return 0;
    if (lo == 0 && hi == 2) return 1;
    if (lo == 1 && hi == 2) return 2;
    throw std::invalid_argument("pair_index: invalid user pair");
}

int excluded_user(int p) { return p == 0 ? 2 : (p == 1 ? 1 : 0); }

int DofAllocation::user_streams(int j) const {
    switch (j) {
        case 0: return d12 + d13;
        case 1: return d12 + d23;
        case 2: return d13 + d23;
        default: throw std::invalid_argument("user_streams: invalid user");
    }
}

std::pair<DofAllocation, ReducedConfig> allocate_streams(const AntennaConfig& cfg) {
    const auto bound = bounds::dof_bounds(cfg);
    DofAllocation alloc;
    ReducedConfig red;
    red.binding_case = bound.binding_case;
    red.m_bar = {cfg.m1, cfg.m2, cfg.m3};

    if (bound.binding_case == bounds::BindingCase::C) {
        red.m_bar = case_c_reduction(cfg);
        AntennaConfig reduced_cfg{red.m_bar[0], red.m_bar[1], red.m_bar[2], cfg.n};
        // The reduction equation forces the reduced config's minimum onto
        // the 2m2+2m3 or m1+m2+m3 term, so this dispatch never loops.
        const auto sub = bounds::dof_bounds(reduced_cfg);
        allocate_ab(reduced_cfg, sub.binding_case, alloc, red);
    } else {
        allocate_ab(cfg, bound.binding_case, alloc, red);
    }

    for (int j = 0; j < 3; ++j) {
        red.user_antenna_selection[j] = iota_indices(red.m_bar[j]);
    }
    return {alloc, red};
}

Mat BeamformingPlan::full_uplink_precoder(int j, int k) const {
    const int slots = alloc.slots;
    const int mj = cfg.user_antennas(j);
    const Mat& vr = v[j][k];
    Mat full = Mat::Zero(mj * slots, vr.cols());
    const auto& sel = reduced.user_antenna_selection[j];
    for (int s = 0; s < slots; ++s) {
        for (std::size_t i = 0; i < sel.size(); ++i) {
            full.row(s * mj + sel[i]) =
                vr.row(s * static_cast<int>(sel.size()) + static_cast<int>(i));
        }
    }
    return full;
}

double BeamformingPlan::precoder_energy(int j) const {
    double e = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (k == j) continue;
        e += v[j][k].squaredNorm();
    }
    return e;
}

BeamformingPlan build_plan(const AntennaConfig& cfg, const ChannelRealization& ch) {
    check_realization_matches(cfg, ch);

    BeamformingPlan plan;
    plan.cfg = cfg;
    std::tie(plan.alloc, plan.reduced) = allocate_streams(cfg);
    const int slots = plan.alloc.slots;
    const int n_bar = plan.reduced.n_bar;
    const int n_ext = cfg.n * slots;

    const ChannelRealization chx = (slots == 2) ? channel::extend_channel(ch) : ch;

    // User-side antenna selection (case C only; never combined with slots=2).
    std::array<Mat, 3> h_user;
    std::array<Mat, 3> d_user;
    for (int j = 0; j < 3; ++j) {
        const auto& sel = plan.reduced.user_antenna_selection[j];
        const int mj = cfg.user_antennas(j);
        Mat cols(n_ext, static_cast<int>(sel.size()) * slots);
        Mat rows(static_cast<int>(sel.size()) * slots, n_ext);
        for (int s = 0; s < slots; ++s) {
            for (std::size_t i = 0; i < sel.size(); ++i) {
                const int reduced_idx = s * static_cast<int>(sel.size()) +
                                        static_cast<int>(i);
                cols.col(reduced_idx) = chx.h[j].col(s * mj + sel[i]);
                rows.row(reduced_idx) = chx.d[j].row(s * mj + sel[i]);
            }
        }
        h_user[j] = std::move(cols);
        d_user[j] = std::move(rows);
    }

    // Relay-side dimension reduction.
    if (plan.reduced.relay_projection) {
        rng::NormalSampler sampler(kRelayProjectionSeed);
        plan.relay_rx_reduce =
            orthonormal_rows(rng::normal_matrix(n_bar, n_ext, sampler));
        plan.relay_tx_embed =
            orthonormal_cols(rng::normal_matrix(n_ext, n_bar, sampler));
    } else {
        plan.relay_rx_reduce = Mat::Identity(n_ext, n_ext).topRows(n_bar);
        plan.relay_tx_embed = plan.relay_rx_reduce.transpose();
    }

    for (int j = 0; j < 3; ++j) {
        plan.h_bar[j] = plan.relay_rx_reduce * h_user[j];
        plan.d_bar[j] = d_user[j] * plan.relay_tx_embed;
        const int r = linalg::rank(plan.h_bar[j]);
        const int expect = static_cast<int>(
            std::min(plan.h_bar[j].rows(), plan.h_bar[j].cols()));
        if (r != expect) {
            throw DegenerateChannel("reduced uplink channel is rank deficient");
        }
        if (linalg::rank(plan.d_bar[j]) !=
            static_cast<int>(std::min(plan.d_bar[j].rows(), plan.d_bar[j].cols()))) {
            throw DegenerateChannel("reduced downlink channel is rank deficient");
        }
    }

    const bool case_a =
        plan.reduced.effective_case == bounds::BindingCase::A;

    for (int p = 0; p < 3; ++p) {
        const int d = plan.alloc.pair_streams(p);
        const auto [a, b] = kPairs[p];
        const int l = excluded_user(p);
        if (d == 0) {
            plan.v[a][b] = Mat::Zero(plan.h_bar[a].cols(), 0);
            plan.v[b][a] = Mat::Zero(plan.h_bar[b].cols(), 0);
            plan.n_proj[p] = Mat::Zero(0, n_bar);
            plan.t[p] = Mat::Zero(n_bar, 0);
            continue;
        }

        Mat aligned;  // n_bar x d, common image of both precoders
        if (case_a) {
            // span(h_bar[b]) lies inside span(h_bar[0]); steer user 1 onto it.
            // The basis of the aligned space is rotated onto the singular
            // directions of user 1's steering section, so an ill-conditioned
            // inversion burdens one stream instead of leaking into all.
            const linalg::SubspaceBasis span_b = linalg::column_space(plan.h_bar[b]);
            if (span_b.dim() != d) {
                throw DegenerateChannel("aligned span has unexpected dimension");
            }
            const Mat section =
                linalg::pseudo_inverse(plan.h_bar[a]) * span_b.basis;
            Eigen::JacobiSVD<Mat> svd(section,
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
            plan.v[a][b] = section * svd.matrixV();
            aligned = span_b.basis * svd.matrixV();
            plan.v[b][a] = linalg::pseudo_inverse(plan.h_bar[b]) * aligned;
        } else {
            const auto inter =
                linalg::column_space_intersection(plan.h_bar[a], plan.h_bar[b]);
            if (inter.dim() < d) {
                throw DegenerateChannel(
                    "uplink intersection subspace smaller than allocation");
            }
            plan.v[a][b] = inter.va.leftCols(d);
            plan.v[b][a] = inter.vb.leftCols(d);
            aligned = plan.h_bar[a] * plan.v[a][b];
        }

        const SubspaceBasis left_null = linalg::left_null_space(plan.h_bar[l]);
        if (left_null.dim() != d) {
            throw DegenerateChannel("relay null space has unexpected dimension");
        }
        const Mat n_raw = left_null.basis.transpose();  // d x n_bar
        const Mat gain = n_raw * aligned;               // d x d
        const double smin = linalg::min_singular_value(gain);
        const double smax = gain.norm();
        if (smin <= 1e-10 * std::max(1.0, smax)) {
            throw DegenerateChannel(
                "aligned subspace is not separable from the zero-forced user");
        }
        // Normalize so the relay sees u_ab + u_ba directly on this pair.
        plan.n_proj[p] = gain.fullPivLu().solve(n_raw);

        const SubspaceBasis tnull = linalg::null_space(plan.d_bar[l]);
        if (tnull.dim() != d) {
            throw DegenerateChannel("downlink null space has unexpected dimension");
        }
        plan.t[p] = tnull.basis;
    }

    for (int j = 0; j < 3; ++j) {
        const double e = plan.precoder_energy(j);
        plan.uplink_power_scale[j] = e > 0.0 ? std::sqrt(slots / e) : 1.0;
    }
    // Relay output energy per symbol-power unit (unit-variance symbols and
    // unit noise); informational, the simulator rescales for the actual P.
    double relay_energy = 0.0;
    Mat noise_gain = Mat::Zero(n_bar, n_bar);
    for (int p = 0; p < 3; ++p) {
        if (plan.alloc.pair_streams(p) == 0) continue;
        const auto [a, b] = kPairs[p];
        const Mat coef_a = plan.n_proj[p] * plan.h_bar[a] * plan.v[a][b];
        const Mat coef_b = plan.n_proj[p] * plan.h_bar[b] * plan.v[b][a];
        relay_energy += (plan.t[p] * coef_a).squaredNorm();
        relay_energy += (plan.t[p] * coef_b).squaredNorm();
        noise_gain += plan.t[p] * plan.n_proj[p];
    }
    relay_energy += noise_gain.squaredNorm();
    plan.relay_power_scale =
        relay_energy > 0.0 ? std::sqrt(slots / relay_energy) : 1.0;

    return plan;
}

std::vector<PlanCheck> validate_plan(const BeamformingPlan& plan,
                                     const ChannelRealization& ch) {
    check_realization_matches(plan.cfg, ch);
    std::vector<PlanCheck> checks;
    const int n_bar = plan.reduced.n_bar;

    std::vector<Mat> aligned_blocks;
    for (int p = 0; p < 3; ++p) {
        const int d = plan.alloc.pair_streams(p);
        if (d == 0) continue;
        const auto [a, b] = kPairs[p];
        const int l = excluded_user(p);
        const std::string tag =
            std::to_string(a + 1) + std::to_string(b + 1);

        const Mat img_a = plan.h_bar[a] * plan.v[a][b];
        const Mat img_b = plan.h_bar[b] * plan.v[b][a];
        aligned_blocks.push_back(img_a);

        const Mat proj_a =
            linalg::projector(linalg::column_space(img_a).basis, n_bar);
        const Mat proj_b =
            linalg::projector(linalg::column_space(img_b).basis, n_bar);
        const double span_res = linalg::max_abs(proj_a - proj_b);
        checks.push_back({"span_alignment_" + tag, span_res, kSpanTol,
                          span_res <= kSpanTol});

        const double relay_zf = linalg::max_abs(plan.n_proj[p] * plan.h_bar[l]);
        checks.push_back({"relay_zero_forcing_" + tag, relay_zf,
                          kZeroForcingTol, relay_zf <= kZeroForcingTol});

        const double dl_zf = linalg::max_abs(plan.d_bar[l] * plan.t[p]);
        checks.push_back({"downlink_zero_forcing_" + tag, dl_zf,
                          kZeroForcingTol, dl_zf <= kZeroForcingTol});

        const Mat gain_a = plan.n_proj[p] * img_a;
        const Mat gain_b = plan.n_proj[p] * img_b;
        const double inv_floor = 1e-8;
        const double smin =
            std::min(linalg::min_singular_value(gain_a),
                     linalg::min_singular_value(gain_b));
        checks.push_back({"relay_gain_invertible_" + tag, smin, inv_floor,
                          smin > inv_floor});
    }

    // Every receiver's stacked downlink precoder must have full column rank.
    for (int k = 0; k < 3; ++k) {
        std::vector<int> incoming;
        for (int p = 0; p < 3; ++p) {
            if (plan.alloc.pair_streams(p) == 0) continue;
            if (kPairs[p].a == k || kPairs[p].b == k) incoming.push_back(p);
        }
        if (incoming.empty()) continue;
        int cols = 0;
        for (int p : incoming) cols += plan.alloc.pair_streams(p);
        Mat stack(plan.d_bar[k].rows(), cols);
        int off = 0;
        for (int p : incoming) {
            const int d = plan.alloc.pair_streams(p);
            stack.middleCols(off, d) = plan.d_bar[k] * plan.t[p];
            off += d;
        }
        const double smin = linalg::min_singular_value(stack);
        const double smax = stack.norm();
        const double floor = 1e-8 * std::max(1.0, smax);
        checks.push_back({"receiver_stack_rank_user" + std::to_string(k + 1),
                          smin, floor, smin > floor});
    }

    // The active aligned subspaces jointly fill the reduced relay space.
    if (!aligned_blocks.empty()) {
        int cols = 0;
        for (const auto& blk : aligned_blocks) cols += static_cast<int>(blk.cols());
        Mat stack(n_bar, cols);
        int off = 0;
        for (const auto& blk : aligned_blocks) {
            stack.middleCols(off, static_cast<int>(blk.cols())) = blk;
            off += static_cast<int>(blk.cols());
        }
        const int r = linalg::rank(stack);
        checks.push_back({"aligned_subspaces_fill_relay",
                          static_cast<double>(r), static_cast<double>(n_bar),
                          r == n_bar});
    }

    // Stream accounting against the sum-DoF formula.
    const int target_dof = bounds::dof_bounds(plan.cfg).sum_dof;
    const int achieved = 2 * plan.alloc.total_pair_streams() / plan.alloc.slots;
    checks.push_back({"stream_accounting", static_cast<double>(achieved),
                      static_cast<double>(target_dof), achieved == target_dof});

    return checks;
}

bool all_pass(const std::vector<PlanCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(),
                       [](const PlanCheck& c) { return c.pass; });
}

}  // namespace ydof::scheme
