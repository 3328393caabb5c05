#pragma once

#include <vector>

#include "mechlab/mrf.hpp"
#include "mechlab/report.hpp"
#include "mechlab/spectral.hpp"
#include "mechlab/valuation.hpp"

namespace mechlab {

struct TruncatedSumStats {
    double r = 0;
    std::vector<double> mean;               // E[C_i]
    std::vector<double> var;                // Var[C_i]
    std::vector<std::vector<double>> cov;   // Cov[C_i, C_j]
    double mean_sum = 0;                    // E[C]
    double var_sum = 0;                     // Var[C]
};

struct TruncatedVarianceResult {
    TruncatedSumStats stats;
    VerificationReport checks;
};

// C_i = t_i 1[t_i <= r] on scalar alphabets.
TruncatedVarianceResult truncated_variance_report(const MrfInstance& inst, const JointDistribution& dist, double r);

struct PoincareResult {
    double lhs = 0;       // n gamma Var[g]
    double rhs = 0;       // sum_i E[(g - E[g | t_{-i}])^2]
    double variance = 0;
    bool vacuous = false; // constant g
    double extremal_ratio = 0;  // rhs / Var for the eigenvector witness
};

// Sum_i E[(g - E[g | t_{-i}])^2].
double conditional_variance_sum(const JointDistribution& dist, const std::vector<double>& g);
double variance(const JointDistribution& dist, const std::vector<double>& g);

// Witness g* = D^{-1/2} u_2 on the positive support, 0 elsewhere.
std::vector<double> poincare_witness(const GlauberChain& chain);

PoincareResult poincare_report(const JointDistribution& dist, const GlauberChain& chain, const std::vector<double>& g);

struct SelfBoundingResult {
    VerificationReport checks;
    double mean_g = 0;
    double var_g = 0;
    double cond_var_sum = 0;
};

// g(t) = v(t, C(t)), g_i(t) = v(t, C(t) \ {i}), C(t) = {i : V_i < cutoff}.
// With n_gamma > 0 also checks Var[g] <= cutoff E[g] / (n gamma).
SelfBoundingResult self_bounding_check(const Valuation& v, const JointDistribution& dist, double cutoff,
                                       double n_gamma = 0);

struct CoreBundleInputs {
    double srev = 0;      // one-item SRev for XOS, separate SRev for additive
    double brev = 0;
    double core = 0;      // E[v(t, C(t))] (XOS) or E[C] (additive)
    double n_gamma = 0;   // n * spectral gap; <= 0 when unavailable
    double delta = 0;
    double r = 0;         // additive cutoff
};

VerificationReport core_bundle_bound(const MrfInstance& inst, const JointDistribution& dist,
                                     const CoreBundleInputs& in);

}  // namespace mechlab
