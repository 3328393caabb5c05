#pragma once

// Test-side instance builders and brute-force oracles. Nothing here calls into
// the library's numerical code; only the data types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "mechlab/mrf.hpp"

namespace testkit {

using mechlab::Hyperedge;
using mechlab::ItemSpec;
using mechlab::MrfInstance;
using mechlab::ValuationKind;

inline MrfInstance scalar_instance(const std::vector<std::vector<double>>& alphabets,
                                   ValuationKind kind = ValuationKind::Additive) {
    MrfInstance inst;
    for (std::size_t i = 0; i < alphabets.size(); ++i) {
        ItemSpec it;
        it.name = "item" + std::to_string(i);
        for (double v : alphabets[i]) it.alphabet.push_back({v});
        it.node_potential.assign(alphabets[i].size(), 0.0);
        inst.items.push_back(it);
    }
    inst.valuation.kind = kind;
    if (kind == ValuationKind::ConstrainedAdditive) {
        inst.valuation.feasible_sets.push_back({});
        for (int i = 0; i < static_cast<int>(alphabets.size()); ++i) inst.valuation.feasible_sets.push_back({i});
    }
    return inst;
}

// Two binary items with potential +J on agreement and -J otherwise.
inline MrfInstance ising(double J, std::vector<double> values = {1, 2}, ValuationKind kind = ValuationKind::Additive) {
    auto inst = scalar_instance({values, values}, kind);
    inst.edges.push_back({{0, 1}, {J, -J, -J, J}});
    return inst;
}

struct RandomSpec {
    int n_max = 3;
    int alphabet_max = 3;
    double psi_max = 1.0;
    ValuationKind kind = ValuationKind::Additive;
    int clauses = 2;
    bool triples = true;
};

inline MrfInstance random_instance(std::mt19937_64& rng, const RandomSpec& spec) {
    std::uniform_real_distribution<double> psi(-spec.psi_max, spec.psi_max);
    std::uniform_real_distribution<double> u01(0, 1);
    const int n = std::uniform_int_distribution<int>(1, spec.n_max)(rng);
    MrfInstance inst;
    inst.valuation.kind = spec.kind;
    const bool xos = spec.kind == ValuationKind::Xos;
    if (xos) inst.valuation.clauses = spec.clauses;
    for (int i = 0; i < n; ++i) {
        ItemSpec it;
        it.name = "x" + std::to_string(i);
        const int k = std::uniform_int_distribution<int>(1, spec.alphabet_max)(rng);
        std::set<std::vector<double>> seen;
        while (static_cast<int>(seen.size()) < k) {
            std::vector<double> sym;
            for (int c = 0; c < (xos ? spec.clauses : 1); ++c)
                sym.push_back(0.5 * std::uniform_int_distribution<int>(0, 8)(rng));
            seen.insert(sym);
        }
        it.alphabet.assign(seen.begin(), seen.end());
        for (int a = 0; a < k; ++a) it.node_potential.push_back(psi(rng));
        inst.items.push_back(it);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (u01(rng) < 0.7) {
                Hyperedge e{{i, j}, {}};
                for (std::size_t x = 0; x < inst.items[i].alphabet.size() * inst.items[j].alphabet.size(); ++x)
                    e.table.push_back(psi(rng));
                inst.edges.push_back(e);
            }
    if (spec.triples && n == 3 && u01(rng) < 0.3) {
        Hyperedge e{{0, 1, 2}, {}};
        std::size_t sz = 1;
        for (const auto& it : inst.items) sz *= it.alphabet.size();
        for (std::size_t x = 0; x < sz; ++x) e.table.push_back(psi(rng));
        inst.edges.push_back(e);
    }
    if (spec.kind == ValuationKind::ConstrainedAdditive) {
        std::set<std::vector<int>> fam{{}};
        for (unsigned s = 1; s < (1u << n); ++s) {
            if (u01(rng) < 0.5) continue;
            // Add s and all of its subsets.
            for (unsigned sub = s;; sub = (sub - 1) & s) {
                std::vector<int> v;
                for (int i = 0; i < n; ++i)
                    if ((sub >> i) & 1u) v.push_back(i);
                fam.insert(v);
                if (sub == 0) break;
            }
        }
        inst.valuation.feasible_sets.assign(fam.begin(), fam.end());
    }
    return inst;
}

// Odometer over all types, item 0 most significant.
inline std::vector<std::vector<int>> all_types(const MrfInstance& inst) {
    std::vector<std::vector<int>> out;
    std::vector<int> t(inst.items.size(), 0);
    while (true) {
        out.push_back(t);
        int i = static_cast<int>(t.size()) - 1;
        while (i >= 0 && ++t[i] == static_cast<int>(inst.items[i].alphabet.size())) t[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

inline double log_weight(const MrfInstance& inst, const std::vector<int>& t) {
    double w = 0;
    for (std::size_t i = 0; i < t.size(); ++i) w += inst.items[i].node_potential[t[i]];
    for (const auto& e : inst.edges) {
        std::size_t idx = 0;
        for (int m : e.members) idx = idx * inst.items[m].alphabet.size() + t[m];
        w += e.table[idx];
    }
    return w;
}

inline std::vector<double> brute_pmf(const MrfInstance& inst) {
    auto types = all_types(inst);
    std::vector<double> p;
    double z = 0;
    for (const auto& t : types) {
        p.push_back(std::exp(log_weight(inst, t)));
        z += p.back();
    }
    for (double& x : p) x /= z;
    return p;
}

inline double brute_value(const MrfInstance& inst, const std::vector<int>& t, unsigned S) {
    const int n = static_cast<int>(inst.items.size());
    auto sym = [&](int i) { return inst.items[i].alphabet[t[i]]; };
    switch (inst.valuation.kind) {
        case ValuationKind::Additive: {
            double s = 0;
            for (int i = 0; i < n; ++i)
                if ((S >> i) & 1u) s += sym(i)[0];
            return s;
        }
        case ValuationKind::UnitDemand: {
            double s = 0;
            for (int i = 0; i < n; ++i)
                if ((S >> i) & 1u) s = std::max(s, sym(i)[0]);
            return s;
        }
        case ValuationKind::ConstrainedAdditive: {
            double best = 0;
            for (const auto& f : inst.valuation.feasible_sets) {
                double s = 0;
                bool inside = true;
                for (int i : f) {
                    if (!((S >> i) & 1u)) inside = false;
                    s += sym(i)[0];
                }
                if (inside) best = std::max(best, s);
            }
            return best;
        }
        case ValuationKind::Xos: {
            double best = 0;
            for (int k = 0; k < inst.valuation.clauses; ++k) {
                double s = 0;
                for (int i = 0; i < n; ++i)
                    if ((S >> i) & 1u) s += sym(i)[k];
                best = std::max(best, s);
            }
            return best;
        }
    }
    return 0;
}

// Score used for regions and lookahead prices: the item's stand-alone value.
inline double item_score(const MrfInstance& inst, int i, int a) {
    const auto& s = inst.items[i].alphabet[a];
    return inst.valuation.kind == ValuationKind::Xos ? *std::max_element(s.begin(), s.end()) : s[0];
}

inline std::vector<double> brute_marginal(const MrfInstance& inst, int i) {
    auto types = all_types(inst);
    auto p = brute_pmf(inst);
    std::vector<double> m(inst.items[i].alphabet.size(), 0.0);
    for (std::size_t k = 0; k < types.size(); ++k) m[types[k][i]] += p[k];
    return m;
}

// alpha[i][j]: largest TV distance between conditionals of i over contexts that differ at j only.
inline std::vector<std::vector<double>> brute_alpha(const MrfInstance& inst) {
    const int n = static_cast<int>(inst.items.size());
    auto types = all_types(inst);
    auto p = brute_pmf(inst);
    std::vector<std::vector<double>> alpha(n, std::vector<double>(n, 0.0));
    auto cond = [&](int i, std::vector<int> t, std::vector<double>& out) {
        out.assign(inst.items[i].alphabet.size(), 0.0);
        double z = 0;
        for (std::size_t a = 0; a < out.size(); ++a) {
            t[i] = static_cast<int>(a);
            out[a] = std::exp(log_weight(inst, t));
            z += out[a];
        }
        for (double& x : out) x /= z;
    };
    std::vector<double> c1, c2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (const auto& t : types) {
                if (t[i] != 0) continue;
                for (std::size_t b = 0; b < inst.items[j].alphabet.size(); ++b) {
                    auto s = t;
                    s[j] = static_cast<int>(b);
                    cond(i, t, c1);
                    cond(i, s, c2);
                    double tv = 0;
                    for (std::size_t a = 0; a < c1.size(); ++a) tv += std::abs(c1[a] - c2[a]);
                    alpha[i][j] = std::max(alpha[i][j], tv / 2);
                }
            }
        }
    return alpha;
}

inline std::vector<std::vector<double>> brute_beta(const MrfInstance& inst) {
    const int n = static_cast<int>(inst.items.size());
    std::vector<std::vector<double>> beta(n, std::vector<double>(n, 0.0));
    auto types = all_types(inst);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (const auto& t : types) {
                double s = 0;
                for (const auto& e : inst.edges) {
                    if (std::find(e.members.begin(), e.members.end(), i) == e.members.end()) continue;
                    if (std::find(e.members.begin(), e.members.end(), j) == e.members.end()) continue;
                    std::size_t idx = 0;
                    for (int m : e.members) idx = idx * inst.items[m].alphabet.size() + t[m];
                    s += e.table[idx];
                }
                beta[i][j] = std::max(beta[i][j], std::abs(s));
            }
        }
    return beta;
}

inline double eigen_rho(const std::vector<std::vector<double>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return 0;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = m[i][j];
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Glauber transition matrix built from the brute-force joint.
inline Eigen::MatrixXd brute_glauber(const MrfInstance& inst) {
    auto types = all_types(inst);
    auto p = brute_pmf(inst);
    const int n = static_cast<int>(inst.items.size());
    const int N = static_cast<int>(types.size());
    auto index_of = [&](const std::vector<int>& t) {
        return static_cast<int>(std::find(types.begin(), types.end(), t) - types.begin());
    };
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    for (int x = 0; x < N; ++x)
        for (int i = 0; i < n; ++i) {
            double z = 0;
            std::vector<int> ys;
            for (std::size_t a = 0; a < inst.items[i].alphabet.size(); ++a) {
                auto t = types[x];
                t[i] = static_cast<int>(a);
                ys.push_back(index_of(t));
                z += p[ys.back()];
            }
            for (int y : ys) P(x, y) += p[y] / z / n;
        }
    return P;
}

// 1 - second largest eigenvalue of the symmetrized chain.
inline double eigen_gap(const MrfInstance& inst) {
    auto P = brute_glauber(inst);
    auto p = brute_pmf(inst);
    const int N = static_cast<int>(p.size());
    Eigen::MatrixXd S(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) S(x, y) = std::sqrt(p[x]) * P(x, y) / std::sqrt(p[y]);
    S = (S + S.transpose()) / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    auto ev = es.eigenvalues();  // ascending
    return N < 2 ? 1.0 : 1 - ev(N - 2);
}

inline double myerson_brute(const std::vector<double>& values, const std::vector<double>& mass) {
    double best = 0;
    for (double p : values) {
        double s = 0;
        for (std::size_t k = 0; k < values.size(); ++k)
            if (values[k] >= p) s += mass[k];
        best = std::max(best, p * s);
    }
    return best;
}

inline double brute_brev(const MrfInstance& inst) {
    auto types = all_types(inst);
    auto p = brute_pmf(inst);
    const unsigned full = (1u << inst.items.size()) - 1;
    std::vector<double> vals;
    for (const auto& t : types) vals.push_back(brute_value(inst, t, full));
    return myerson_brute(vals, p);
}

inline double brute_srev_separate(const MrfInstance& inst) {
    double s = 0;
    for (std::size_t i = 0; i < inst.items.size(); ++i) {
        std::vector<double> v;
        for (const auto& a : inst.items[i].alphabet) v.push_back(a[0]);
        s += myerson_brute(v, brute_marginal(inst, static_cast<int>(i)));
    }
    return s;
}

// Exhaustive posted prices with the buyer taking one best item.
inline double brute_srev_one_item(const MrfInstance& inst) {
    const int n = static_cast<int>(inst.items.size());
    auto types = all_types(inst);
    auto p = brute_pmf(inst);
    // Candidate prices: every stand-alone value of any item, or withheld.
    std::set<double> pool;
    for (int i = 0; i < n; ++i)
        for (const auto& t : types) pool.insert(brute_value(inst, t, 1u << i));
    pool.insert(std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> cands(n, std::vector<double>(pool.begin(), pool.end()));
    std::vector<double> price(n);
    double best = 0;
    // Exact ties are resolved by every item order; the supremum over real prices is the best.
    std::vector<int> order(n);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            for (int j = 0; j < n; ++j) order[j] = j;
            do {
                double r = 0;
                for (std::size_t k = 0; k < types.size(); ++k) {
                    int pick = -1;
                    double u = 0;
                    for (int j : order) {
                        double uj = brute_value(inst, types[k], 1u << j) - price[j];
                        if (uj >= 0 && (pick < 0 || uj > u)) {
                            pick = j;
                            u = uj;
                        }
                    }
                    if (pick >= 0) r += p[k] * price[pick];
                }
                best = std::max(best, r);
            } while (std::next_permutation(order.begin(), order.end()));
            return;
        }
        for (double c : cands[i]) {
            price[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return best;
}

// Lookahead revenue: for each item and context, the best price among values keeping the
// item the favorite (smallest index among maximal scores).
inline double brute_ronen(const MrfInstance& inst) {
    const int n = static_cast<int>(inst.items.size());
    auto types = all_types(inst);
    auto p = brute_pmf(inst);
    double total = 0;
    for (int i = 0; i < n; ++i)
        for (const auto& t : types) {
            if (t[i] != 0) continue;
            const int k = static_cast<int>(inst.items[i].alphabet.size());
            std::vector<double> w(k), score(k);
            double mass = 0;
            for (int a = 0; a < k; ++a) {
                auto s = t;
                s[i] = a;
                w[a] = p[std::find(types.begin(), types.end(), s) - types.begin()];
                score[a] = item_score(inst, i, a);
                mass += w[a];
            }
            if (mass <= 0) continue;
            auto favorite = [&](double v) {
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    double sj = item_score(inst, j, t[j]);
                    if (j < i ? sj >= v : sj > v) return false;
                }
                return true;
            };
            double best = 0;
            for (int a = 0; a < k; ++a) {
                if (!favorite(score[a])) continue;
                double s = 0;
                for (int b = 0; b < k; ++b)
                    if (score[b] >= score[a]) s += w[b];
                best = std::max(best, score[a] * s);
            }
            total += best;
        }
    return total;
}

// Minimum over the grid of log weight ratios x_u = ln(v_u / v_parent) in [-12, 12], step 1e-3,
// of max_u sum_w (v_u / v_w) a[u][w]. Nonzero entries must form a forest. For a level L the
// whole grid is searched exactly: a child only enters its parent's row through exp(-x_c), so
// the best choice is the largest grid value that keeps the child's subtree at or below L.
inline double grid_min_row_sum(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<int> parent(n, -2), order;
    for (int s = 0; s < n; ++s) {
        if (parent[s] != -2) continue;
        parent[s] = -1;
        order.push_back(s);
        for (std::size_t h = order.size() - 1; h < order.size(); ++h)
            for (int w = 0; w < n; ++w)
                if (w != order[h] && parent[w] == -2 && (a[order[h]][w] > 0 || a[w][order[h]] > 0)) {
                    parent[w] = order[h];
                    order.push_back(w);
                }
    }
    const int steps = 24000;
    auto grid = [](int g) { return -12.0 + g * 1e-3; };
    auto feasible = [&](double L) {
        std::vector<double> pull(n, 0.0);  // sum over children of a[u][c] exp(-x_c)
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int u = *it;
            const int p = parent[u];
            if (p < 0) {
                if (pull[u] > L) return false;
                continue;
            }
            // The parent term grows with x_u, so the feasible grid values form a prefix.
            if (pull[u] + a[u][p] * std::exp(grid(0)) > L) return false;
            int best = 0, top = steps;
            while (best < top) {
                int mid = (best + top + 1) / 2;
                if (pull[u] + a[u][p] * std::exp(grid(mid)) <= L) best = mid;
                else top = mid - 1;
            }
            pull[p] += a[p][u] * std::exp(-grid(best));
        }
        return true;
    };
    double hi = 0;
    for (int u = 0; u < n; ++u) {
        double s = 0;
        for (int w = 0; w < n; ++w) s += w == u ? 0 : a[u][w];
        hi = std::max(hi, s);
    }
    double lo = 0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace testkit
