#include "mechlab/concentration.hpp"

#include <algorithm>
#include <cmath>

namespace mechlab {

TruncatedVarianceResult truncated_variance_report(const MrfInstance& inst, const JointDistribution& dist, double r) {
    Valuation v(inst);
    const int n = dist.n();
    const double delta = max_weighted_degree(inst);
    TruncatedVarianceResult out;
    auto& st = out.stats;
    st.r = r;
    st.mean.assign(n, 0.0);
    st.var.assign(n, 0.0);
    st.cov.assign(n, std::vector<double>(n, 0.0));

    auto C = [&](std::size_t k, int i) {
        double x = v.scalar(i, dist.coord(k, i));
        return x <= r ? x : 0.0;
    };
    for (std::size_t k = 0; k < dist.size(); ++k)
        for (int i = 0; i < n; ++i) st.mean[i] += dist.pmf[k] * C(k, i);
    for (double m : st.mean) st.mean_sum += m;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        double p = dist.pmf[k];
        if (p == 0) continue;
        double total = 0;
        for (int i = 0; i < n; ++i) {
            double di = C(k, i) - st.mean[i];
            total += C(k, i);
            for (int j = 0; j < n; ++j) st.cov[i][j] += p * di * (C(k, j) - st.mean[j]);
        }
        st.var_sum += p * (total - st.mean_sum) * (total - st.mean_sum);
    }
    double decomposed = 0;
    for (int i = 0; i < n; ++i) {
        st.var[i] = st.cov[i][i];
        for (int j = 0; j < n; ++j) decomposed += st.cov[i][j];
    }

    const double e4 = std::exp(4 * delta);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out.checks.add_le("cov_" + std::to_string(i) + "_" + std::to_string(j), st.cov[i][j],
                              (e4 - 1) * st.mean[i] * st.mean[j]);
    out.checks.add_le("var_truncated_sum", st.var_sum, 2 * r * r + (e4 - 1) * st.mean_sum * st.mean_sum);
    out.checks.add_le("variance_decomposition", std::abs(st.var_sum - decomposed),
                      1e-10 * std::max(1.0, st.var_sum), "identity", 0, 0);
    return out;
}

double variance(const JointDistribution& dist, const std::vector<double>& g) {
    double mean = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) mean += dist.pmf[k] * g[k];
    double var = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) var += dist.pmf[k] * (g[k] - mean) * (g[k] - mean);
    return var;
}

double conditional_variance_sum(const JointDistribution& dist, const std::vector<double>& g) {
    double total = 0;
    for (int i = 0; i < dist.n(); ++i) {
        const std::size_t s = dist.strides[i];
        for (std::size_t base = 0; base < dist.size(); ++base) {
            if (dist.coord(base, i) != 0) continue;
            double m = 0, w = 0;
            for (int a = 0; a < dist.sizes[i]; ++a) {
                w += dist.pmf[base + a * s];
                m += dist.pmf[base + a * s] * g[base + a * s];
            }
            if (!(w > 0)) continue;
            m /= w;
            for (int a = 0; a < dist.sizes[i]; ++a) {
                double d = g[base + a * s] - m;
                total += dist.pmf[base + a * s] * d * d;
            }
        }
    }
    return total;
}

std::vector<double> poincare_witness(const GlauberChain& chain) {
    std::vector<double> g(chain.stationary.size(), 0.0);
    for (std::size_t k = 0; k < chain.states.size() && k < chain.second_vector.size(); ++k)
        g[chain.states[k]] = chain.second_vector[k] / std::sqrt(chain.stationary[chain.states[k]]);
    return g;
}

PoincareResult poincare_report(const JointDistribution& dist, const GlauberChain& chain, const std::vector<double>& g) {
    PoincareResult r;
    r.variance = variance(dist, g);
    r.rhs = conditional_variance_sum(dist, g);
    r.lhs = chain.items * chain.gap * r.variance;
    double scale = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) scale += dist.pmf[k] * g[k] * g[k];
    r.vacuous = !(r.variance > 1e-24 * std::max(scale, 1e-300));
    auto w = poincare_witness(chain);
    double wv = variance(dist, w);
    r.extremal_ratio = wv > 0 ? conditional_variance_sum(dist, w) / wv : 0.0;
    return r;
}

SelfBoundingResult self_bounding_check(const Valuation& v, const JointDistribution& dist, double cutoff,
                                       double n_gamma) {
    SelfBoundingResult out;
    const int n = dist.n();
    auto cls = classify(v, dist, cutoff, ItemScore::Single);
    std::vector<double> g(dist.size());
    std::vector<int> t(n);
    double worst_neg = -INFINITY, worst_cap = -INFINITY, worst_sum = -INFINITY;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        dist.decode(k, t.data());
        ItemSet C = cls.truncated[k];
        g[k] = v.value(t, C);
        if (!(dist.pmf[k] > 0)) continue;
        double drops = 0;
        for (int i = 0; i < n; ++i) {
            double d = g[k] - v.value(t, C & ~(1u << i));
            worst_neg = std::max(worst_neg, -d);
            worst_cap = std::max(worst_cap, d);
            drops += d;
        }
        worst_sum = std::max(worst_sum, drops - g[k]);
    }
    for (std::size_t k = 0; k < dist.size(); ++k) out.mean_g += dist.pmf[k] * g[k];
    out.var_g = variance(dist, g);
    out.cond_var_sum = conditional_variance_sum(dist, g);

    out.checks.add_le("self_bounding_nonneg", worst_neg, 0.0, "max_t,i of g_i - g");
    out.checks.add_le("self_bounding_cap", worst_cap, cutoff, "max_t,i of g - g_i");
    out.checks.add_le("self_bounding_sum", worst_sum, 0.0, "max_t of sum_i (g - g_i) - g");
    out.checks.add_le("sum_bound", out.cond_var_sum, cutoff * out.mean_g);
    if (n_gamma > 0) out.checks.add_le("var_g_spectral", out.var_g, cutoff * out.mean_g / n_gamma);
    return out;
}

VerificationReport core_bundle_bound(const MrfInstance& inst, const JointDistribution& dist,
                                     const CoreBundleInputs& in) {
    VerificationReport rep;
    Valuation v(inst);
    const int n = dist.n();
    std::vector<int> t(n);

    if (inst.valuation.kind == ValuationKind::Additive) {
        const double e4 = std::exp(4 * in.delta);
        double sell = 0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            dist.decode(k, t.data());
            if (v.value(t, full_set(n)) >= in.core / 2) sell += dist.pmf[k];
        }
        bool branch = in.core > std::sqrt(2.0) * in.r;
        if (branch) {
            rep.add_le("bundle_sell_prob", 1.0 / (4 * (e4 + 1)), sell, "E[C] > sqrt2 r: Pr[sum t >= E[C]/2]");
            rep.add_le("core_le_bundle_additive", in.core, 8 * (e4 + 1) * in.brev, "E[C] > sqrt2 r");
        } else {
            rep.add_le("core_le_bundle_additive", in.core, std::sqrt(2.0) * in.r, "branch E[C] <= sqrt2 r");
        }
        return rep;
    }

    if (!(in.n_gamma > 0)) return rep;
    const double s = std::sqrt(in.n_gamma);
    rep.add_le("xos_core_bound", in.core, std::max(4 * in.srev / s, (7 + 4 / s) * in.brev));
    if (in.core > 4 * in.srev / s) {
        auto cls = classify(v, dist, 2 * in.srev, ItemScore::Single);
        double second = 0, above = 0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            dist.decode(k, t.data());
            double g = v.value(t, cls.truncated[k]);
            second += dist.pmf[k] * g * g;
            if (g > in.core / 3) above += dist.pmf[k];
        }
        double pz = second > 0 ? (4.0 / 9.0) * in.core * in.core / second : 0.0;
        rep.add_le("paley_zygmund", pz, above, "Pr[g > Core/3] vs (2/3)^2 E[g]^2/E[g^2]");
    }
    return rep;
}

}  // namespace mechlab
