#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechlab/mrf.hpp"
#include "mechlab/valuation.hpp"

namespace mechlab {

constexpr double kWithheld = std::numeric_limits<double>::infinity();

enum class Floor { AtLeast, Above };

// Revenue curve of a discrete one-dimensional distribution. Masses need not be
// normalized; revenues are in the same units as the masses.
struct RevenueCurve {
    std::vector<double> values;    // distinct, ascending
    std::vector<double> mass;
    std::vector<double> survival;  // Pr[t >= v_j]
    std::vector<bool> allowed;     // price admissible under the floor
    std::vector<double> hull;      // concave hull evaluated at survival[j] (allowed only)
    std::vector<double> ironed;    // ironed virtual values (allowed, positive mass)
    std::vector<double> raw;       // unironed virtual values
    double price = kWithheld;
    double revenue = 0;
    bool empty = true;             // no admissible price carries mass

    // Index of v in `values`, or -1.
    int index_of(double v) const;
    double ironed_at(double v) const;
    // sum_j mass_j * ironed_j^+ over admissible values.
    double positive_part_sum() const;
};

RevenueCurve myerson_single(const std::vector<double>& values, const std::vector<double>& mass, double floor = 0,
                            Floor kind = Floor::AtLeast);

struct PostedPrices {
    std::vector<double> prices;  // +inf withholds the item
    double revenue = 0;
    bool heuristic = false;
    std::string semantics;       // "separate" (additive) or "one-item"
    std::vector<int> priority;   // tie-break rank per item; empty means smallest index first
};

// Buyer takes the item maximizing V_i - p_i when that utility is >= 0. Exact ties go to
// the lowest rank, or the smallest index when `rank` is empty.
double one_item_revenue(const Valuation& v, const JointDistribution& dist, const std::vector<double>& prices,
                        const std::vector<int>& rank = {});

PostedPrices srev(const MrfInstance& inst, const JointDistribution& dist);
// One-item semantics regardless of the valuation kind.
PostedPrices srev_one_item(const MrfInstance& inst, const JointDistribution& dist);

struct BundlePrice {
    double price = kWithheld;
    double revenue = 0;
};

BundlePrice brev(const MrfInstance& inst, const JointDistribution& dist);

struct Mechanism {
    int n = 0;
    std::vector<std::vector<double>> lottery;  // [type][item set], includes the empty set
    std::vector<double> payment;

    double allocation(std::size_t t, int i) const;
    static Mechanism null(int n, std::size_t types);
    nlohmann::json to_json() const;
    static Mechanism from_json(const nlohmann::json& j, int n, std::size_t types);
};

struct OptimalMechanism {
    Mechanism mech;
    double revenue = 0;
    long pivots = 0;
    double worst_ic_ir = 0;  // most negative constraint slack
};

struct LpCaps {
    int max_items = 5;
    std::size_t max_types = 300;
    double max_tableau = 6e8;
};

OptimalMechanism opt_revenue_lp(const MrfInstance& inst, const JointDistribution& dist, const LpCaps& caps = {});

// Smallest IC/IR slack of a mechanism (negative means violated).
double ic_ir_slack(const Valuation& v, const JointDistribution& dist, const Mechanism& m);
double mechanism_revenue(const JointDistribution& dist, const Mechanism& m);

struct LookaheadPrice {
    int item;
    std::size_t context;  // support index of the context with t_i = 0
    double price;
};

struct RonenResult {
    double revenue = 0;
    std::vector<LookaheadPrice> prices;
};

// Ronen's lookahead revenue in the COPIES setting. The price offered to item i
// ranges over the values that keep (t_i, t_{-i}) in R_i.
RonenResult ronen_copies(const MrfInstance& inst, const JointDistribution& dist);
RonenResult ronen_copies(const Valuation& v, const JointDistribution& dist, ItemScore score);

// Allowed floor for item i at context `base`: values v with (v, t_{-i}) in R_i.
std::pair<double, Floor> region_floor(const std::vector<std::vector<double>>& score, const JointDistribution& dist,
                                      int i, std::size_t base);

// Conditional revenue curve of item i's score restricted to R_i at a context.
RevenueCurve conditional_curve(const std::vector<std::vector<double>>& score, const JointDistribution& dist, int i,
                               std::size_t base, bool restrict_to_region);

ItemScore default_score(const Valuation& v);

// g_i(a) = ironed virtual value of the marginal of the item score, positive part.
std::vector<std::vector<double>> marginal_phi_plus(const Valuation& v, const JointDistribution& dist,
                                                   ItemScore score);
// p_i = min{ score_i(a) : g_i(a) >= tau }, +inf when no value qualifies.
std::vector<double> threshold_prices(const Valuation& v, const std::vector<std::vector<double>>& g, double tau,
                                     ItemScore score);

}  // namespace mechlab
