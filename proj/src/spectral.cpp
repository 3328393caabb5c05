#include "mechlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mechlab/errors.hpp"

namespace mechlab {

GlauberChain glauber_chain(const JointDistribution& dist, std::size_t cap) {
    if (dist.size() > cap)
        throw StateSpaceTooLarge("state space " + std::to_string(dist.size()) + " exceeds cap " + std::to_string(cap));
    GlauberChain ch;
    const int n = dist.n();
    const std::size_t N = dist.size();
    ch.items = n;
    ch.stationary = dist.pmf;
    ch.transition = Matrix(N, N);
    for (std::size_t x = 0; x < N; ++x) {
        for (int i = 0; i < n; ++i) {
            std::size_t base = dist.context_base(x, i);
            double m = context_mass(dist, i, base);
            if (!(m > 0)) {
                ch.transition(x, x) += 1.0 / n;
                continue;
            }
            for (int a = 0; a < dist.sizes[i]; ++a) {
                std::size_t y = base + a * dist.strides[i];
                ch.transition(x, y) += dist.pmf[y] / m / n;
            }
        }
    }

    for (std::size_t x = 0; x < N; ++x)
        if (dist.pmf[x] > 0) ch.states.push_back(x);
    const std::size_t M = ch.states.size();
    Matrix s(M, M);
    for (std::size_t a = 0; a < M; ++a) {
        for (std::size_t b = a; b < M; ++b) {
            std::size_t x = ch.states[a], y = ch.states[b];
            double v = std::sqrt(dist.pmf[x] / dist.pmf[y]) * ch.transition(x, y);
            if (a != b) {
                double w = std::sqrt(dist.pmf[y] / dist.pmf[x]) * ch.transition(y, x);
                v = 0.5 * (v + w);
            }
            s(a, b) = s(b, a) = v;
        }
    }
    auto eig = jacobi_eigen(s);
    ch.eigenvalues = eig.values;
    if (M >= 2) {
        ch.lambda2 = eig.values[1];
        ch.second_vector.resize(M);
        for (std::size_t k = 0; k < M; ++k) ch.second_vector[k] = eig.vectors(k, 1);
    } else {
        ch.lambda2 = 0;
    }
    ch.gap = std::min(1.0, 1.0 - ch.lambda2);
    return ch;
}

double detailed_balance_residual(const GlauberChain& chain) {
    double worst = 0;
    const std::size_t N = chain.stationary.size();
    for (std::size_t x = 0; x < N; ++x)
        for (std::size_t y = x + 1; y < N; ++y)
            worst = std::max(worst, std::abs(chain.stationary[x] * chain.transition(x, y) -
                                             chain.stationary[y] * chain.transition(y, x)));
    return worst;
}

DobrushinMatrix d_dobrushin(const std::vector<std::vector<double>>& alpha_tv, const std::vector<double>& scales) {
    const std::size_t n = alpha_tv.size();
    if (scales.size() != n) throw NonPositiveScale("expected one scale per item");
    for (double v : scales)
        if (!(v > 0) || !std::isfinite(v)) throw NonPositiveScale("scales must be positive and finite");
    DobrushinMatrix d;
    d.scales = scales;
    d.weighted = std::any_of(scales.begin(), scales.end(), [&](double v) { return v != scales[0]; });
    d.entries = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) d.entries(i, j) = scales[i] / scales[j] * alpha_tv[i][j];
    auto pr = spectral_radius_nonneg(d.entries);
    d.spectral_radius = pr.rho;
    d.method = pr.method;
    d.reducible = pr.reducible;
    return d;
}

DobrushinMatrix d_dobrushin(const MrfInstance& inst, const JointDistribution& dist, const std::vector<double>& scales) {
    return d_dobrushin(dependence_report(inst, dist).alpha_matrix, scales);
}

VerificationReport verify_gap_inequality(const GlauberChain& chain, const std::vector<DobrushinMatrix>& matrices) {
    VerificationReport rep;
    const double ng = chain.items * chain.gap;
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        const auto& m = matrices[k];
        std::string name = m.weighted ? "gap_vs_dobrushin_weighted_" + std::to_string(k) : "gap_vs_dobrushin";
        rep.add_le(name, 1.0 - m.spectral_radius, ng, "n*gamma >= 1 - rho_d (" + m.method + ")", 1e-8, 0);
    }
    return rep;
}

std::vector<std::size_t> sample_chain(const GlauberChain& chain, std::uint64_t seed, std::size_t steps,
                                      std::size_t start) {
    const std::size_t N = chain.stationary.size();
    if (start >= N) throw ValidationError("start: state index out of range");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> traj{start};
    std::size_t x = start;
    for (std::size_t s = 0; s < steps; ++s) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double acc = 0;
        std::size_t next = x;
        for (std::size_t y = 0; y < N; ++y) {
            double p = chain.transition(x, y);
            if (p <= 0) continue;
            acc += p;
            next = y;
            if (u < acc) break;
        }
        x = next;
        traj.push_back(x);
    }
    return traj;
}

std::vector<double> tv_curve(const GlauberChain& chain, std::size_t start, std::size_t horizon) {
    const std::size_t N = chain.stationary.size();
    if (start >= N) throw ValidationError("start: state index out of range");
    std::vector<double> mu(N, 0.0);
    mu[start] = 1;
    std::vector<double> out;
    for (std::size_t s = 0; s <= horizon; ++s) {
        double tv = 0;
        for (std::size_t x = 0; x < N; ++x) tv += std::abs(mu[x] - chain.stationary[x]);
        out.push_back(0.5 * tv);
        if (s < horizon) mu = vec_mat(mu, chain.transition);
    }
    return out;
}

}  // namespace mechlab
