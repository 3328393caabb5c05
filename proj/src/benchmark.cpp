#include "mechlab/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mechlab/concentration.hpp"
#include "mechlab/errors.hpp"

namespace mechlab {

using nlohmann::json;

// ---------------------------------------------------------------- decomposition

double BenchmarkTerms::bound() const {
    if (family == BenchmarkFamily::Xos) return 2 * single + 4 * tail + 4 * core;
    return single + tail + core;
}

json BenchmarkTerms::to_json() const {
    json j = {{"family", family == BenchmarkFamily::Xos ? "xos" : "constrained_additive"},
              {"single", single},
              {"tail", tail},
              {"core", core},
              {"cutoff", cutoff},
              {"revenue", revenue},
              {"bound", bound()}};
    if (non_favorite) j["non_favorite"] = *non_favorite;
    return j;
}

BenchmarkTerms decompose(const MrfInstance& inst, const JointDistribution& dist, const Mechanism& mech, double r,
                         BenchmarkFamily family) {
    Valuation v(inst);
    const int n = dist.n();
    const bool xos = family == BenchmarkFamily::Xos;
    const ItemScore score = xos ? ItemScore::Single : ItemScore::Scalar;
    const auto& sc = scores(v, score);
    BenchmarkTerms out;
    out.family = family;
    out.cutoff = xos ? 2 * r : r;
    out.revenue = mechanism_revenue(dist, mech);
    double nonfav = 0;

    std::map<std::size_t, RevenueCurve> curves;
    std::vector<int> t(n);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const double p = dist.pmf[k];
        if (!(p > 0)) continue;
        dist.decode(k, t.data());
        for (int i = 0; i < n; ++i) vals[i] = sc[i][t[i]];
        const int fav = favorite(vals.data(), n);

        std::size_t base = dist.context_base(k, fav);
        std::size_t key = base * n + fav;
        auto it = curves.find(key);
        if (it == curves.end()) it = curves.emplace(key, conditional_curve(sc, dist, fav, base, true)).first;
        out.single += p * mech.allocation(k, fav) * it->second.ironed_at(vals[fav]);

        ItemSet C = 0;
        for (int i = 0; i < n; ++i) {
            if (vals[i] < out.cutoff) C |= 1u << i;
            if (i == fav) continue;
            if (xos) {
                if (vals[i] >= out.cutoff) out.tail += p * vals[i];
            } else {
                nonfav += p * mech.allocation(k, i) * vals[i];
                if (vals[i] > out.cutoff) out.tail += p * vals[i];
            }
        }
        if (xos) {
            out.core += p * v.value(t, C);
        } else {
            for (int i = 0; i < n; ++i)
                if (vals[i] <= out.cutoff) out.core += p * vals[i];
        }
    }
    if (!xos) out.non_favorite = nonfav;
    return out;
}

// ---------------------------------------------------------------- prophet

namespace {

ThresholdOutcome run_threshold(const JointDistribution& dist, const std::vector<std::vector<double>>& g, double tau,
                               double delta, double expected_max) {
    ThresholdOutcome o;
    o.tau = tau;
    const int n = dist.n();
    double excess = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const double p = dist.pmf[k];
        if (!(p > 0)) continue;
        bool stopped = false;
        for (int i = 0; i < n; ++i) {
            double gi = g[i][dist.coord(k, i)];
            excess += p * std::max(0.0, gi - tau);
            if (!stopped && gi >= tau) {
                o.reward += p * gi;
                stopped = true;
            }
        }
    }
    const double c = std::exp(-4 * delta) / 2;
    o.lemma_bound = tau / 2 + c * excess;
    o.half_max_bound = c * expected_max;
    return o;
}

double threshold_margin(const ThresholdOutcome& o) {
    return std::min(o.reward - o.lemma_bound, o.reward - o.half_max_bound);
}

}  // namespace

ProphetResult prophet(const JointDistribution& dist, const std::vector<std::vector<double>>& g, double delta) {
    ProphetResult res;
    const int n = dist.n();
    std::map<double, double> law;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!(dist.pmf[k] > 0)) continue;
        double m = -INFINITY;
        for (int i = 0; i < n; ++i) m = std::max(m, g[i][dist.coord(k, i)]);
        law[m] += dist.pmf[k];
        res.expected_max += dist.pmf[k] * m;
    }
    std::vector<double> support;
    std::vector<double> tail_prob;
    double acc = 0;
    for (auto it = law.rbegin(); it != law.rend(); ++it) {
        acc += it->second;
        support.push_back(it->first);
        tail_prob.push_back(acc);
    }
    // support is descending; tail_prob[k] = Pr[max >= support[k]].
    std::size_t pick = support.size() - 1;
    for (std::size_t k = 0; k < support.size(); ++k)
        if (tail_prob[k] >= 0.5 - 1e-15) {
            pick = k;
            break;
        }
    res.primary = run_threshold(dist, g, support[pick], delta, res.expected_max);
    res.best = res.primary;
    if (pick > 0) {
        res.adjacent = run_threshold(dist, g, support[pick - 1], delta, res.expected_max);
        if (threshold_margin(*res.adjacent) > threshold_margin(res.primary)) res.best = *res.adjacent;
    }
    std::string note = "tau=" + std::to_string(res.best.tau);
    res.checks.add_le("prophet_lemma_form", res.best.lemma_bound, res.best.reward, note);
    res.checks.add_le("prophet_half_max", res.best.half_max_bound, res.best.reward, note);
    return res;
}

UdOutcome ud_mechanism(const MrfInstance& inst, const JointDistribution& dist, double opt_revenue) {
    Valuation v(inst);
    const double delta = max_weighted_degree(inst);
    auto g = marginal_phi_plus(v, dist, ItemScore::Single);
    auto pr = prophet(dist, g, delta);
    std::vector<double> taus{pr.primary.tau};
    if (pr.adjacent) taus.push_back(pr.adjacent->tau);

    UdOutcome out;
    bool first = true;
    for (double tau : taus) {
        auto p = threshold_prices(v, g, tau, ItemScore::Single);
        double r = one_item_revenue(v, dist, p);
        if (first || r > out.revenue) {
            out.revenue = r;
            out.prices = p;
            out.tau = tau;
            first = false;
        }
    }
    for (int i = 0; i < inst.n(); ++i)
        if (out.prices[i] == kWithheld) out.withheld.push_back(i);
    if (opt_revenue >= 0)
        out.checks.add_le("ud_posted_price", opt_revenue / (8 * std::exp(12 * delta)), out.revenue,
                          "Rev(OPT)/(8 e^{12 Delta}) <= posted-price revenue");
    return out;
}

// ---------------------------------------------------------------- identities

IdentityErrors identity_errors(const Valuation& v, const JointDistribution& dist, ItemScore score) {
    IdentityErrors e;
    const auto& sc = scores(v, score);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); };
    for (int i = 0; i < dist.n(); ++i) {
        for (std::size_t base = 0; base < dist.size(); ++base) {
            if (dist.coord(base, i) != 0) continue;
            if (!(context_mass(dist, i, base) > 0)) continue;
            for (bool restrict : {false, true}) {
                auto c = conditional_curve(sc, dist, i, base, restrict);
                double best = 0;
                for (std::size_t j = 0; j < c.values.size(); ++j)
                    if (c.allowed[j] && c.mass[j] > 0) best = std::max(best, c.values[j] * c.survival[j]);
                e.ironing = std::max(e.ironing, rel(c.positive_part_sum(), best));
            }
        }
    }
    // Sum over R_i of f(t) * ironed^+, type by type.
    const int n = dist.n();
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!(dist.pmf[k] > 0)) continue;
        for (int i = 0; i < n; ++i) vals[i] = sc[i][dist.coord(k, i)];
        int fav = favorite(vals.data(), n);
        auto c = conditional_curve(sc, dist, fav, dist.context_base(k, fav), true);
        e.single_sum += dist.pmf[k] * std::max(0.0, c.ironed_at(vals[fav]));
    }
    e.ronen_revenue = ronen_copies(v, dist, score).revenue;
    e.ronen = rel(e.single_sum, e.ronen_revenue);
    return e;
}

// ---------------------------------------------------------------- theorem suite

json Analysis::summary() const {
    json j;
    j["delta"] = dep.delta;
    j["beta"] = dep.beta;
    j["alpha"] = dep.alpha;
    if (has_chain) {
        j["gamma"] = chain.gap;
        j["n_gamma"] = n_gamma;
        j["rho_d"] = dobrushin.spectral_radius;
    }
    j["srev"] = {{"revenue", srev.revenue}, {"semantics", srev.semantics}, {"heuristic", srev.heuristic}};
    j["srev_one_item"] = {{"revenue", srev_one.revenue}, {"heuristic", srev_one.heuristic}};
    j["brev"] = brev.revenue;
    j["ronen"] = ronen.revenue;
    if (has_opt) j["opt"] = opt.revenue;
    else j["opt_unavailable"] = opt_note;
    if (ca_terms) j["benchmark_constrained_additive"] = ca_terms->to_json();
    if (xos_terms) j["benchmark_xos"] = xos_terms->to_json();
    return j;
}

Analysis analyze(const MrfInstance& inst, const JointDistribution& dist, const AnalyzeOptions& opts) {
    Analysis a;
    auto& rep = a.report;
    Valuation v(inst);
    const int n = inst.n();
    const ValuationKind kind = inst.valuation.kind;

    a.dep = dependence_report(inst, dist);
    const double delta = a.dep.delta;
    const double e4 = std::exp(4 * delta), e8 = std::exp(8 * delta), e12 = std::exp(12 * delta);
    {
        double worst = -INFINITY;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) worst = std::max(worst, a.dep.alpha_matrix[i][j] - std::min(1.0, a.dep.beta_matrix[i][j]));
        if (n > 1) rep.add_le("alpha_le_beta", worst, 0.0, "max_ij alpha_ij - min(1, beta_ij)", 1e-12, 0);
    }
    rep.append(conditional_bound_check(inst, dist));

    a.dobrushin = d_dobrushin(a.dep.alpha_matrix, std::vector<double>(n, 1.0));
    if (dist.size() <= opts.chain_cap) {
        a.chain = glauber_chain(dist, opts.chain_cap);
        a.has_chain = true;
        a.n_gamma = n * a.chain.gap;
        a.dep.has_spectral = true;
        a.dep.gamma = a.chain.gap;
        a.dep.rho_d = a.dobrushin.spectral_radius;
        rep.append(verify_gap_inequality(a.chain, {a.dobrushin}));
        auto w = poincare_witness(a.chain);
        if (a.chain.states.size() >= 2) {
            auto pr = poincare_report(dist, a.chain, w);
            rep.add_le("poincare_extremal", std::abs(pr.extremal_ratio - a.n_gamma), 1e-6,
                       "|ratio(g*) - n gamma|", 0, 0);
            std::vector<double> bundle(dist.size());
            std::vector<int> t(n);
            for (std::size_t k = 0; k < dist.size(); ++k) {
                dist.decode(k, t.data());
                bundle[k] = v.value(t, full_set(n));
            }
            auto pb = poincare_report(dist, a.chain, bundle);
            rep.add_le("poincare_bundle_value", pb.lhs, pb.rhs, pb.vacuous ? "vacuous: constant g" : "");
        }
    }

    a.srev = srev(inst, dist);
    a.srev_one = kind == ValuationKind::Additive ? srev_one_item(inst, dist) : a.srev;
    a.brev = brev(inst, dist);
    const ItemScore score = default_score(v);
    a.ronen = ronen_copies(v, dist, score);
    auto ids = identity_errors(v, dist, score);
    a.ironing_error = ids.ironing;
    a.ronen_identity_error = ids.ronen;
    a.single_sum = ids.single_sum;
    rep.add_le("ironing_identity", ids.ironing, 1e-9, "relative error", 0, 0);
    rep.add_le("single_sum_equals_ronen", ids.ronen, 1e-9, "relative error", 0, 0);

    try {
        a.opt = opt_revenue_lp(inst, dist, opts.lp);
        a.has_opt = true;
    } catch (const LpTooLarge& e) {
        a.opt_note = e.what();
    }
    const double r = a.srev.revenue;
    const double r1 = a.srev_one.revenue;
    if (a.has_opt) {
        const double opt = a.opt.revenue;
        rep.add_le("lp_ic_ir", 0.0, a.opt.worst_ic_ir, "smallest IC/IR slack");
        rep.add_le("opt_ge_brev", a.brev.revenue, opt);
        rep.add_le("opt_ge_srev", r, opt, a.srev.semantics);
        if (kind == ValuationKind::Additive) rep.add_le("opt_ge_srev_one_item", r1, opt);

        if (kind != ValuationKind::Xos) {
            a.ca_terms = decompose(inst, dist, a.opt.mech, r, BenchmarkFamily::ConstrainedAdditive);
            const auto& b = *a.ca_terms;
            rep.add_le("benchmark_constrained_additive", opt, b.bound(), "Rev(OPT) <= Single + Tail + Core");
            rep.add_le("opt_le_single_nonfavorite", opt, b.single + *b.non_favorite);
            rep.add_le("nonfavorite_le_tail_core", *b.non_favorite, b.tail + b.core);
            rep.add_le("tail_alt_dobrushin", b.tail, r * (1 + n * a.dep.alpha), "Tail <= r(1 + n alpha)");
        }
        a.xos_terms = decompose(inst, dist, a.opt.mech, r1, BenchmarkFamily::Xos);
        rep.add_le("benchmark_xos", opt, a.xos_terms->bound(), "Rev(OPT) <= 2 Single + 4 Tail + 4 Core");

        if (kind == ValuationKind::Additive) {
            const auto& b = *a.ca_terms;
            rep.add_le("thm_additive", opt, (2 * e4 + std::sqrt(2.0)) * r + 8 * (e4 + 1) * a.brev.revenue);
            rep.add_le("additive_single", b.single, e4 * r, "Single <= e^{4 Delta} SRev");
            rep.add_le("additive_tail", b.tail, e4 * r, "Tail <= e^{4 Delta} SRev");
            auto tv = truncated_variance_report(inst, dist, r);
            rep.append(tv.checks);
            CoreBundleInputs in;
            in.srev = r;
            in.brev = a.brev.revenue;
            in.core = tv.stats.mean_sum;
            in.delta = delta;
            in.r = r;
            rep.append(core_bundle_bound(inst, dist, in));
        }

        if (kind == ValuationKind::UnitDemand) {
            const auto& b = *a.ca_terms;
            auto ud = ud_mechanism(inst, dist, opt);
            rep.append(ud.checks);
            rep.add_le("ud_le_srev", ud.revenue, r1, "constructed prices are one feasible price vector");
            rep.add_le("ud_single_le_ronen", b.single, a.ronen.revenue);
            rep.add_le("ud_nonfavorite_le_ronen", *b.non_favorite, a.ronen.revenue);
            auto g = marginal_phi_plus(v, dist, ItemScore::Scalar);
            auto pr = prophet(dist, g, delta);
            rep.add_le("ronen_le_e8d_emax_phi", a.ronen.revenue, e8 * pr.expected_max);
            rep.append(pr.checks);
        }

        if (kind == ValuationKind::Xos) {
            const auto& b = *a.xos_terms;
            rep.add_le("xos_single", b.single, 4 * e12 * r1, "Single <= 4 e^{12 Delta} SRev");
            rep.add_le("xos_tail", b.tail, e8 * r1, "Tail <= e^{8 Delta} SRev");
            double tail_prob = 0;
            for (int i = 0; i < n; ++i) {
                auto mi = marginal(dist, i);
                for (int x = 0; x < dist.sizes[i]; ++x)
                    if (v.single(i, x) >= 2 * r1) tail_prob += mi[x];
            }
            rep.add_le("xos_tail_prob", tail_prob, e4, "sum_i Pr[V_i >= 2 SRev]");
            auto sb = self_bounding_check(v, dist, 2 * r1, a.has_chain ? a.n_gamma : 0);
            rep.append(sb.checks);
            if (a.has_chain && a.n_gamma > 0) {
                const double best = std::max(r1, a.brev.revenue);
                rep.add_le("thm_xos", opt, 12 * e12 * r1 + (28 + 16 / std::sqrt(a.n_gamma)) * best);
                CoreBundleInputs in;
                in.srev = r1;
                in.brev = a.brev.revenue;
                in.core = b.core;
                in.n_gamma = a.n_gamma;
                in.delta = delta;
                rep.append(core_bundle_bound(inst, dist, in));
                if (a.dep.beta < 1)
                    rep.add_le("thm_high_temperature", opt,
                               12 * std::exp(12 * a.dep.beta) * r1 + (28 + 16 / std::sqrt(1 - a.dep.beta)) * best);
            }
        }
    }
    return a;
}

VerificationReport verify_theorems(const MrfInstance& inst, const JointDistribution& dist) {
    return analyze(inst, dist).report;
}

}  // namespace mechlab
