#ifndef YDOF_CHANNEL_HPP
#define YDOF_CHANNEL_HPP

#include <array>
#include <cstdint>
#include <utility>

#include "ydof/linalg.hpp"

namespace ydof::channel {

using linalg::Mat;

/// Antenna counts (m1 >= m2 >= m3 >= 1 after relabeling) for the three users
/// plus the relay count n.
struct AntennaConfig {
    int m1 = 1;
    int m2 = 1;
    int m3 = 1;
    int n = 1;

    /// 0-based user index.
    int user_antennas(int j) const {
        return j == 0 ? m1 : (j == 1 ? m2 : m3);
    }
};

/// external_to_internal[e] = internal (ordered) index of external user e.
using UserPermutation = std::array<int, 3>;

struct PowerConfig {
    double p = 1.0;
    double noise_variance = 1.0;
};

/// One draw of the two-hop channel. h[j] is the uplink matrix of user j
/// (n*ext x m_j*ext), d[j] the downlink matrix (m_j*ext x n*ext).
struct ChannelRealization {
    std::array<Mat, 3> h;
    std::array<Mat, 3> d;
    int extension_factor = 1;
    bool reciprocal = false;
};

/// Sorts antenna counts descending (stable, so ties keep input order) and
/// returns the relabeling permutation. Rejects counts < 1.
std::pair<AntennaConfig, UserPermutation> validate_and_order(int m1, int m2,
                                                             int m3, int n);

/// i.i.d. standard-normal channel entries from a deterministic seeded stream.
/// With reciprocal set, d[j] = h[j]^T; otherwise downlinks are independent.
ChannelRealization sample_channel(const AntennaConfig& cfg, bool reciprocal,
                                  std::uint64_t seed);

/// Two-slot extension: every matrix becomes blkdiag(m, m) (the channel is
/// constant over the block). Rejects already-extended input.
ChannelRealization extend_channel(const ChannelRealization& ch);

}  // namespace ydof::channel

#endif  // YDOF_CHANNEL_HPP
