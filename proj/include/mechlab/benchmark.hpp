#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechlab/mrf.hpp"
#include "mechlab/report.hpp"
#include "mechlab/revenue.hpp"
#include "mechlab/spectral.hpp"
#include "mechlab/valuation.hpp"

namespace mechlab {

enum class BenchmarkFamily { ConstrainedAdditive, Xos };

struct BenchmarkTerms {
    BenchmarkFamily family = BenchmarkFamily::ConstrainedAdditive;
    double single = 0;
    std::optional<double> non_favorite;  // constrained-additive family only
    double tail = 0;
    double core = 0;
    double cutoff = 0;                   // r for the additive form, 2r for XOS
    double revenue = 0;                  // revenue of the decomposed mechanism

    // Single + Tail + Core, or 2 Single + 4 Tail + 4 Core.
    double bound() const;
    nlohmann::json to_json() const;
};

// r is SRev; the XOS family truncates at 2r.
BenchmarkTerms decompose(const MrfInstance& inst, const JointDistribution& dist, const Mechanism& mech, double r,
                         BenchmarkFamily family);

struct ThresholdOutcome {
    double tau = 0;
    double reward = 0;
    double lemma_bound = 0;     // tau/2 + e^{-4 Delta}/2 sum_i E[(g_i - tau)^+]
    double half_max_bound = 0;  // e^{-4 Delta}/2 E[max g]
};

struct ProphetResult {
    double expected_max = 0;
    ThresholdOutcome primary;                 // largest v with Pr[max g >= v] >= 1/2
    std::optional<ThresholdOutcome> adjacent; // next larger support value
    ThresholdOutcome best;
    VerificationReport checks;
};

// g[i][a] is the score of item i at alphabet index a.
ProphetResult prophet(const JointDistribution& dist, const std::vector<std::vector<double>>& g, double delta);

struct UdOutcome {
    std::vector<double> prices;
    double revenue = 0;
    double tau = 0;
    std::vector<int> withheld;  // items with no price meeting the threshold
    VerificationReport checks;
};

// opt_revenue < 0 skips the ratio check.
UdOutcome ud_mechanism(const MrfInstance& inst, const JointDistribution& dist, double opt_revenue = -1);

struct AnalyzeOptions {
    std::size_t chain_cap = 2000;
    LpCaps lp;
};

struct Analysis {
    DependenceReport dep;
    bool has_chain = false;
    GlauberChain chain;
    DobrushinMatrix dobrushin;
    double n_gamma = 0;
    bool has_opt = false;
    OptimalMechanism opt;
    std::string opt_note;
    PostedPrices srev;           // kind-specific semantics
    PostedPrices srev_one;       // one-item semantics
    BundlePrice brev;
    RonenResult ronen;
    std::optional<BenchmarkTerms> ca_terms;
    std::optional<BenchmarkTerms> xos_terms;
    double ironing_error = 0;    // max relative error of the ironing identity
    double ronen_identity_error = 0;
    double single_sum = 0;
    VerificationReport report;

    nlohmann::json summary() const;
};

Analysis analyze(const MrfInstance& inst, const JointDistribution& dist, const AnalyzeOptions& opts = {});
VerificationReport verify_theorems(const MrfInstance& inst, const JointDistribution& dist);

struct IdentityErrors {
    double ironing = 0;
    double ronen = 0;
    double single_sum = 0;
    double ronen_revenue = 0;
};

// Ironing identity at every (i, t_{-i}) context, restricted and unrestricted, and
// sum over R_i of f * ironed^+ against Ronen's revenue. Errors are relative.
IdentityErrors identity_errors(const Valuation& v, const JointDistribution& dist, ItemScore score);

}  // namespace mechlab
