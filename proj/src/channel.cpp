#include "ydof/channel.hpp"

#include <algorithm>
#include <stdexcept>

#include "ydof/rng.hpp"

namespace ydof::channel {

std::pair<AntennaConfig, UserPermutation> validate_and_order(int m1, int m2,
                                                             int m3, int n) {
    if (m1 < 1 || m2 < 1 || m3 < 1 || n < 1) {
        throw std::invalid_argument(
            "antenna counts must be positive integers");
    }
    std::array<std::pair<int, int>, 3> labeled = {{{m1, 0}, {m2, 1}, {m3, 2}}};
    std::stable_sort(labeled.begin(), labeled.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    AntennaConfig cfg;
    cfg.m1 = labeled[0].first;
    cfg.m2 = labeled[1].first;
    cfg.m3 = labeled[2].first;
    cfg.n = n;
    UserPermutation perm{};
    for (int internal = 0; internal < 3; ++internal) {
        perm[labeled[internal].second] = internal;
    }
    return {cfg, perm};
}

ChannelRealization sample_channel(const AntennaConfig& cfg, bool reciprocal,
                                  std::uint64_t seed) {
    rng::NormalSampler sampler(rng::derive_seed(seed, 0xc4a11));
    ChannelRealization ch;
    ch.extension_factor = 1;
    ch.reciprocal = reciprocal;
    for (int j = 0; j < 3; ++j) {
        ch.h[j] = rng::normal_matrix(cfg.n, cfg.user_antennas(j), sampler);
    }
    for (int j = 0; j < 3; ++j) {
        if (reciprocal) {
            ch.d[j] = ch.h[j].transpose();
        } else {
            ch.d[j] = rng::normal_matrix(cfg.user_antennas(j), cfg.n, sampler);
        }
    }
    return ch;
}

namespace {

Mat block_diag_2(const Mat& m) {
    Mat out = Mat::Zero(2 * m.rows(), 2 * m.cols());
    out.topLeftCorner(m.rows(), m.cols()) = m;
    out.bottomRightCorner(m.rows(), m.cols()) = m;
    return out;
}

}  // namespace

ChannelRealization extend_channel(const ChannelRealization& ch) {
    if (ch.extension_factor != 1) {
        throw std::invalid_argument("extend_channel: input is already extended");
    }
    ChannelRealization out;
    out.extension_factor = 2;
    out.reciprocal = ch.reciprocal;
    for (int j = 0; j < 3; ++j) {
        out.h[j] = block_diag_2(ch.h[j]);
        out.d[j] = block_diag_2(ch.d[j]);
    }
    return out;
}

}  // namespace ydof::channel
