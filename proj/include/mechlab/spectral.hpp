#pragma once

#include <cstdint>
#include <vector>

#include "mechlab/linalg.hpp"
#include "mechlab/mrf.hpp"
#include "mechlab/report.hpp"

namespace mechlab {

struct GlauberChain {
    int items = 0;
    Matrix transition;                    // over the full support
    std::vector<double> stationary;       // pmf over the full support
    std::vector<std::size_t> states;      // positive-probability states used for the spectrum
    double gap = 0;                       // 1 - lambda_2 of D^{1/2} P D^{-1/2}
    double lambda2 = 0;
    std::vector<double> eigenvalues;      // descending, restricted to `states`
    std::vector<double> second_vector;    // unit eigenvector for lambda_2, symmetrized coordinates
};

GlauberChain glauber_chain(const JointDistribution& dist, std::size_t cap = 2000);

// Detailed balance residual max |pi(x)P(x,y) - pi(y)P(y,x)|.
double detailed_balance_residual(const GlauberChain& chain);

struct DobrushinMatrix {
    bool weighted = false;
    std::vector<double> scales;
    Matrix entries;
    double spectral_radius = 0;
    std::string method;
    bool reducible = false;
};

DobrushinMatrix d_dobrushin(const std::vector<std::vector<double>>& alpha_tv, const std::vector<double>& scales);
DobrushinMatrix d_dobrushin(const MrfInstance& inst, const JointDistribution& dist, const std::vector<double>& scales);

VerificationReport verify_gap_inequality(const GlauberChain& chain, const std::vector<DobrushinMatrix>& matrices);

std::vector<std::size_t> sample_chain(const GlauberChain& chain, std::uint64_t seed, std::size_t steps,
                                      std::size_t start);

// TV distance to stationarity after 0..horizon steps from a point mass at `start`.
std::vector<double> tv_curve(const GlauberChain& chain, std::size_t start, std::size_t horizon);

}  // namespace mechlab
