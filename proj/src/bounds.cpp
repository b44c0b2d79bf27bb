#include "ydof/bounds.hpp"

#include <algorithm>
#include <stdexcept>

namespace ydof::bounds {

const char* binding_case_name(BindingCase c) {
    switch (c) {
        case BindingCase::A: return "A";
        case BindingCase::B: return "B";
        case BindingCase::C: return "C";
    }
    return "?";
}

int cutset_bound_user(const channel::AntennaConfig& cfg, int j) {
    if (j < 0 || j > 2) throw std::invalid_argument("user index must be 0, 1, or 2");
    const int mj = cfg.user_antennas(j);
    int others = 0;
    for (int k = 0; k < 3; ++k) {
        if (k != j) others += cfg.user_antennas(k);
    }
    return std::min({cfg.n, mj, others});
}

int genie_bound_sum(const channel::AntennaConfig& cfg) {
    return 2 * std::min(cfg.n, cfg.m2 + cfg.m3);
}

DofBoundSet dof_bounds(const channel::AntennaConfig& cfg) {
    DofBoundSet out;
    for (int j = 0; j < 3; ++j) out.cutset_per_user[j] = cutset_bound_user(cfg, j);
    out.cutset_sum = out.cutset_per_user[0] + out.cutset_per_user[1] +
                     out.cutset_per_user[2];
    out.genie_sum = genie_bound_sum(cfg);

    const int case_a = 2 * cfg.m2 + 2 * cfg.m3;
    const int case_b = cfg.m1 + cfg.m2 + cfg.m3;
    const int case_c = 2 * cfg.n;
    out.sum_dof = std::min({case_a, case_b, case_c});
    if (out.sum_dof == case_a) {
        out.binding_case = BindingCase::A;
    } else if (out.sum_dof == case_b) {
        out.binding_case = BindingCase::B;
    } else {
        out.binding_case = BindingCase::C;
    }
    return out;
}

}  // namespace ydof::bounds
