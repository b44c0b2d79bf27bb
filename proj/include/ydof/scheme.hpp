#ifndef YDOF_SCHEME_HPP
#define YDOF_SCHEME_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ydof/bounds.hpp"
#include "ydof/channel.hpp"
#include "ydof/linalg.hpp"

namespace ydof::scheme {

using channel::AntennaConfig;
using channel::ChannelRealization;
using linalg::Mat;

/// Thrown when a required full-rank or invertibility condition fails at
/// tolerance. Generic random channels never trigger this; it guards
/// hand-crafted rank-deficient inputs.
struct DegenerateChannel : std::runtime_error {
    explicit DegenerateChannel(const std::string& what)
        : std::runtime_error(what) {}
};

/// The three bidirectional pairs in fixed order: (1,2), (1,3), (2,3) with
/// 0-based user indices.
struct Pair {
    int a;
    int b;
};
inline constexpr std::array<Pair, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};

/// Index of the unordered pair {j, k} in kPairs.
int pair_index(int j, int k);

/// The user excluded from pair p (the zero-forcing target).
int excluded_user(int p);

/// Per-pair stream counts, counted once per direction. With slots = 2 the
/// counts are totals over both slots.
struct DofAllocation {
    int d12 = 0;
    int d13 = 0;
    int d23 = 0;
    int slots = 1;

    int pair_streams(int p) const {
        return p == 0 ? d12 : (p == 1 ? d13 : d23);
    }
    /// Streams transmitted by user j (sum over its two pairs).
    int user_streams(int j) const;
    int total_pair_streams() const { return d12 + d13 + d23; }
};

/// Which antennas carry the scheme. Relay reduction is by selection of the
/// first n_bar antennas except in the two-slot case, where a generic
/// orthonormal projection over the extended slots is required (pure selection
/// leaves the per-slot subspace geometry too degenerate to zero-force).
struct ReducedConfig {
    int n_bar = 0;                   // relay dimensions used (post-extension)
    std::array<int, 3> m_bar{};      // active antennas per user, per slot
    std::vector<int> relay_antenna_selection;           // empty when projecting
    std::array<std::vector<int>, 3> user_antenna_selection;
    bool relay_projection = false;
    bounds::BindingCase binding_case = bounds::BindingCase::A;
    bounds::BindingCase effective_case = bounds::BindingCase::A;  // A or B
};

/// Everything needed to run the two-hop chain: uplink precoders v[j][k]
/// (m_bar_j * slots x d_jk), relay projections n_proj[p] (d_p x n_bar),
/// downlink precoders t[p] (n_bar x d_p), and the relay-dimension reduction
/// maps. n_proj is normalized so that n_proj * H_a * v[a][b] = I for the
/// lower-indexed user a of each pair; the relay then observes the symbol sum
/// of the two directions on every active pair.
struct BeamformingPlan {
    AntennaConfig cfg;
    DofAllocation alloc;
    ReducedConfig reduced;

    std::array<std::array<Mat, 3>, 3> v;  // v[j][k], ordered pair (j -> k)
    std::array<Mat, 3> n_proj;            // by pair index
    std::array<Mat, 3> t;                 // by pair index

    Mat relay_rx_reduce;  // n_bar x (n * slots); selection rows or projection
    Mat relay_tx_embed;   // (n * slots) x n_bar; selection cols or embedding

    std::array<double, 3> uplink_power_scale{1.0, 1.0, 1.0};  // at P = 1
    double relay_power_scale = 1.0;                           // at P = 1

    /// Reduced uplink/downlink channels actually used by the plan
    /// (h_bar[j] = relay_rx_reduce * H_ext * user-selection).
    std::array<Mat, 3> h_bar;
    std::array<Mat, 3> d_bar;

    /// Precoder of user j for pair (j,k) mapped back to all m_j * slots
    /// physical antennas; rows of deselected antennas are exactly zero.
    Mat full_uplink_precoder(int j, int k) const;

    /// Frobenius energy of user j's stacked precoder.
    double precoder_energy(int j) const;
};

/// One machine-checked plan invariant.
struct PlanCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Case dispatch and stream allocation for a valid config. Case C first
/// searches the lexicographically largest reduced antenna triple satisfying
/// 2n = min(2m2+2m3, m1+m2+m3), then re-dispatches on the reduced config.
std::pair<DofAllocation, ReducedConfig> allocate_streams(const AntennaConfig& cfg);

/// Builds precoders, relay projections and downlink precoders for one
/// channel draw. Throws DegenerateChannel on rank failures.
BeamformingPlan build_plan(const AntennaConfig& cfg, const ChannelRealization& ch);

/// Evaluates every plan invariant with its residual; failures are reported,
/// not thrown.
std::vector<PlanCheck> validate_plan(const BeamformingPlan& plan,
                                     const ChannelRealization& ch);

bool all_pass(const std::vector<PlanCheck>& checks);

/// Tolerances used by validate_plan.
inline constexpr double kSpanTol = 1e-8;
inline constexpr double kZeroForcingTol = 1e-9;

}  // namespace ydof::scheme

#endif  // YDOF_SCHEME_HPP
