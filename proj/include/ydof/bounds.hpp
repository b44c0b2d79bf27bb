#ifndef YDOF_BOUNDS_HPP
#define YDOF_BOUNDS_HPP

#include <array>

#include "ydof/channel.hpp"

namespace ydof::bounds {

/// Which expression attains the sum-DoF minimum. Ties resolve A, then B,
/// then C, so the transmission scheme has a deterministic dispatch and the
/// antenna-reduction path is taken only when strictly necessary.
enum class BindingCase { A, B, C };  // A: 2m2+2m3, B: m1+m2+m3, C: 2n

const char* binding_case_name(BindingCase c);

struct DofBoundSet {
    std::array<int, 3> cutset_per_user{};  // bound on d_jk + d_jl for user j
    int cutset_sum = 0;
    int genie_sum = 0;
    int sum_dof = 0;
    BindingCase binding_case = BindingCase::A;
};

/// Per-user cut-set bound min(n, m_j, m_k + m_l). User index is 0-based.
int cutset_bound_user(const channel::AntennaConfig& cfg, int j);

/// Genie-aided sum bound 2 * min(n, m2 + m3).
int genie_bound_sum(const channel::AntennaConfig& cfg);

/// Sum DoF min(2m2+2m3, m1+m2+m3, 2n) with all constituent bounds.
DofBoundSet dof_bounds(const channel::AntennaConfig& cfg);

}  // namespace ydof::bounds

#endif  // YDOF_BOUNDS_HPP
