#ifndef YDOF_RNG_HPP
#define YDOF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "ydof/linalg.hpp"

namespace ydof::rng {

/// splitmix64 finalizer; used to derive independent per-trial streams from a
/// base seed without overlapping mt19937_64 state.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix(base ^ mix(stream + 0x51ed2701ULL));
}

/// Deterministic standard-normal sampler. Box-Muller on top of mt19937_64 so
/// output is identical across standard libraries (std::normal_distribution is
/// not portable between implementations).
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline linalg::Mat normal_matrix(int rows, int cols, NormalSampler& sampler) {
    linalg::Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = sampler();
    }
    return m;
}

inline linalg::Vec normal_vector(int n, NormalSampler& sampler) {
    linalg::Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = sampler();
    return v;
}

}  // namespace ydof::rng

#endif  // YDOF_RNG_HPP
