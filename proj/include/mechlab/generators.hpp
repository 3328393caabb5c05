#pragma once

#include <array>
#include <vector>

#include "mechlab/mrf.hpp"

namespace mechlab {

// D'' = a' D' + (1 - a') (D_1 x D_2) over a two-item base, as a single pairwise potential.
MrfInstance gen_mix(const MrfInstance& base, double alpha_prime);

// eps_scale <= 0 selects 1e-3 / (2 n k).
MrfInstance gen_copies(int n, double beta, int k, double eps_scale = 0);

struct ShellSequence {
    std::vector<std::array<double, 2>> points;  // g_0 = (0,0), then g_1..g_m
    std::vector<int> shell;                     // shell index N per point (0 for g_0)
    std::vector<double> gap;                    // gap_i, index 0 unused
    double c1 = 0;                              // min ratio of ||g_i||_1 / gap_i between neighbours
    double t_ratio = 0;
    std::vector<double> t;
    std::vector<std::array<double, 2>> types;   // x_1..x_m
    std::vector<double> xi;
    std::vector<double> prob;
    double realized_c = 0;                      // max xi_i / xi_{i-1}

    nlohmann::json to_json() const;
};

inline constexpr double kZeta32 = 2.612375348685488;

ShellSequence shell_sequence(int m);
// c_target <= 0 disables the realized-ratio comparison recorded in the metadata.
MrfInstance gen_shells(int m, double c_target = 0, ShellSequence* seq = nullptr);

MrfInstance reduce_3wise(const MrfInstance& base, double beta_prime);

}  // namespace mechlab
