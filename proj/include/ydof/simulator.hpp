#ifndef YDOF_SIMULATOR_HPP
#define YDOF_SIMULATOR_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ydof/channel.hpp"
#include "ydof/scheme.hpp"

namespace ydof::sim {

using channel::ChannelRealization;
using channel::PowerConfig;
using linalg::Mat;
using linalg::Vec;
using scheme::BeamformingPlan;

/// Symbol vectors per ordered pair; u[j][k] carries the d_jk symbols user j
/// sends to user k.
struct StreamSymbols {
    std::array<std::array<Vec, 3>, 3> u;
};

StreamSymbols zero_symbols(const BeamformingPlan& plan);
StreamSymbols random_symbols(const BeamformingPlan& plan, std::uint64_t seed);

/// Full two-hop execution record. The chain runs at unit scale (symbols enter
/// the precoders as given); power loading only affects the analytic rate
/// computation, never the noiseless signal path.
struct ChainResult {
    Vec relay_observation;                       // reduced, length n_bar
    std::array<Vec, 3> w;                        // per pair index
    std::array<Vec, 3> user_rx;                  // selected antennas x slots
    std::array<Vec, 3> post_cancel;              // stacked blocks per receiver
    std::array<std::array<Vec, 3>, 3> decoded;   // decoded[j][k] ~ u[j][k]
};

/// Uplink, relay projection/forwarding, downlink, self-interference
/// cancellation, and per-pair equalization. Noise (unit variance everywhere)
/// is added only when a seed is given.
ChainResult run_chain(const BeamformingPlan& plan, const ChannelRealization& ch,
                      const StreamSymbols& sym,
                      std::optional<std::uint64_t> noise_seed);

struct RateReport {
    double p = 0.0;
    std::array<std::array<double, 3>, 3> per_message_rate{};  // bits per slot
    double sum_rate = 0.0;
};

/// Gaussian-input achievable rate of each message's effective end-to-end
/// channel: transmit power split over each user's streams, relay output
/// rescaled to meet its own power constraint, exact noise covariance from
/// receiver noise plus forwarded relay noise.
RateReport analytic_rates(const BeamformingPlan& plan,
                          const ChannelRealization& ch,
                          const PowerConfig& power);

/// Analytic transmit powers per channel use at power p; used to audit the
/// power constraint.
struct PowerAudit {
    std::array<double, 3> user_tx_power{};
    double relay_tx_power = 0.0;
};
PowerAudit audit_power(const BeamformingPlan& plan, const ChannelRealization& ch,
                       double p);

struct DofReport {
    std::vector<double> p_grid;
    std::vector<double> sum_rates;
    double estimated_slope = 0.0;
    int sum_dof = 0;
};

/// Sum-rate slope against (1/2)log2(P) between the two extreme grid points.
/// Requires at least two increasing powers with the largest at 40 dB or more.
DofReport estimate_dof(const BeamformingPlan& plan, const ChannelRealization& ch,
                       const std::vector<double>& p_grid);

struct MonteCarloStats {
    int trials = 0;
    int sum_dof = 0;
    double mean_slope = 0.0;
    double min_slope = 0.0;
    double max_slope = 0.0;
    double validate_pass_rate = 0.0;
    std::vector<double> per_trial_slope;
};

/// Independent channel draws (per-trial seeds derived from the base seed),
/// plan validation and slope estimation for each.
MonteCarloStats monte_carlo(const channel::AntennaConfig& cfg, int trials,
                            const std::vector<double>& p_grid,
                            std::uint64_t seed, bool reciprocal);

inline double db_to_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

}  // namespace ydof::sim

#endif  // YDOF_SIMULATOR_HPP
