#include "mechlab/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mechlab/errors.hpp"
#include "mechlab/simplex.hpp"

namespace mechlab {

// ---------------------------------------------------------------- Myerson

int RevenueCurve::index_of(double v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.end() || *it != v) return -1;
    return static_cast<int>(it - values.begin());
}

double RevenueCurve::ironed_at(double v) const {
    int j = index_of(v);
    return j < 0 ? 0.0 : ironed[j];
}

double RevenueCurve::positive_part_sum() const {
    double s = 0;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (allowed[j] && mass[j] > 0) s += mass[j] * std::max(0.0, ironed[j]);
    return s;
}

RevenueCurve myerson_single(const std::vector<double>& values, const std::vector<double>& mass, double floor,
                            Floor kind) {
    RevenueCurve c;
    std::map<double, double> agg;
    for (std::size_t k = 0; k < values.size(); ++k) agg[values[k]] += mass[k];
    for (const auto& [v, m] : agg) {
        c.values.push_back(v);
        c.mass.push_back(m);
    }
    const std::size_t m = c.values.size();
    c.survival.assign(m, 0.0);
    double acc = 0;
    for (std::size_t j = m; j-- > 0;) {
        acc += c.mass[j];
        c.survival[j] = acc;
    }
    c.allowed.resize(m);
    std::vector<std::size_t> pos;
    for (std::size_t j = 0; j < m; ++j) {
        c.allowed[j] = kind == Floor::AtLeast ? c.values[j] >= floor : c.values[j] > floor;
        if (c.allowed[j] && c.mass[j] > 0) pos.push_back(j);
    }
    c.hull.assign(m, 0.0);
    c.ironed.assign(m, 0.0);
    c.raw.assign(m, 0.0);
    if (pos.empty()) return c;
    c.empty = false;

    // Upper concave hull of (q, R) = (S_j, v_j S_j) plus the origin, q ascending.
    struct Pt {
        double q, r;
    };
    std::vector<Pt> pts{{0.0, 0.0}};
    for (std::size_t k = pos.size(); k-- > 0;) pts.push_back({c.survival[pos[k]], c.values[pos[k]] * c.survival[pos[k]]});
    std::vector<Pt> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull.back();
            double cross = (b.q - a.q) * (p.r - a.r) - (b.r - a.r) * (p.q - a.q);
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    auto H = [&](double q) {
        if (q <= 0) return 0.0;
        for (std::size_t k = 1; k < hull.size(); ++k) {
            if (q <= hull[k].q) {
                if (q == hull[k].q) return hull[k].r;
                double w = (q - hull[k - 1].q) / (hull[k].q - hull[k - 1].q);
                return hull[k - 1].r + w * (hull[k].r - hull[k - 1].r);
            }
        }
        return hull.back().r;
    };

    for (std::size_t k = 0; k < pos.size(); ++k) {
        std::size_t j = pos[k];
        double s_next = k + 1 < pos.size() ? c.survival[pos[k + 1]] : 0.0;
        double f = c.mass[j];
        c.hull[j] = H(c.survival[j]);
        c.ironed[j] = (c.hull[j] - H(s_next)) / f;
        double v_next = k + 1 < pos.size() ? c.values[pos[k + 1]] : c.values[j];
        c.raw[j] = c.values[j] - (v_next - c.values[j]) * s_next / f;
        double rev = c.values[j] * c.survival[j];
        if (c.price == kWithheld || rev > c.revenue) {
            c.revenue = rev;
            c.price = c.values[j];
        }
    }
    return c;
}

// ---------------------------------------------------------------- posted prices

double one_item_revenue(const Valuation& v, const JointDistribution& dist, const std::vector<double>& prices,
                        const std::vector<int>& rank) {
    const int n = dist.n();
    double rev = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!(dist.pmf[k] > 0)) continue;
        int pick = -1;
        double best = 0;
        for (int i = 0; i < n; ++i) {
            if (prices[i] == kWithheld) continue;
            double u = v.single(i, dist.coord(k, i)) - prices[i];
            if (u < 0) continue;
            if (pick < 0 || u > best || (u == best && !rank.empty() && rank[i] < rank[pick])) {
                pick = i;
                best = u;
            }
        }
        if (pick >= 0) rev += dist.pmf[k] * prices[pick];
    }
    return rev;
}

ItemScore default_score(const Valuation& v) { return v.additive_family() ? ItemScore::Scalar : ItemScore::Single; }

std::vector<std::vector<double>> marginal_phi_plus(const Valuation& v, const JointDistribution& dist,
                                                   ItemScore score) {
    const auto& sc = scores(v, score);
    std::vector<std::vector<double>> g(dist.n());
    for (int i = 0; i < dist.n(); ++i) {
        auto curve = myerson_single(sc[i], marginal(dist, i));
        for (double x : sc[i]) g[i].push_back(std::max(0.0, curve.ironed_at(x)));
    }
    return g;
}

std::vector<double> threshold_prices(const Valuation& v, const std::vector<std::vector<double>>& g, double tau,
                                     ItemScore score) {
    const auto& sc = scores(v, score);
    std::vector<double> p(g.size(), kWithheld);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t a = 0; a < g[i].size(); ++a)
            if (g[i][a] >= tau) p[i] = std::min(p[i], sc[i][a]);
    return p;
}

PostedPrices srev_one_item(const MrfInstance& inst, const JointDistribution& dist) {
    Valuation v(inst);
    const int n = inst.n();
    PostedPrices out;
    out.semantics = "one-item";
    std::set<double> cand_set;
    for (int i = 0; i < n; ++i)
        for (double x : v.singles()[i]) cand_set.insert(x);
    std::vector<double> cand(cand_set.begin(), cand_set.end());
    cand.push_back(kWithheld);

    std::size_t positive = 0;
    for (double p : dist.pmf) positive += p > 0;
    double combos = std::pow(static_cast<double>(cand.size()), n);
    double orders = std::tgamma(n + 1.0);
    if (n <= 4 && combos * orders * positive * n <= 4e8) {
        // Exact ties are broken by every priority order in turn: each order is the limit of
        // slightly lowered prices, so the best of them is the supremum over price vectors.
        std::vector<std::size_t> idx(n, 0);
        std::vector<double> prices(n);
        std::vector<int> rank(n);
        out.prices.assign(n, kWithheld);
        out.revenue = 0;
        while (true) {
            for (int i = 0; i < n; ++i) prices[i] = cand[idx[i]];
            std::iota(rank.begin(), rank.end(), 0);
            do {
                double r = one_item_revenue(v, dist, prices, rank);
                if (r > out.revenue) {
                    out.revenue = r;
                    out.prices = prices;
                    out.priority = rank;
                }
            } while (std::next_permutation(rank.begin(), rank.end()));
            int i = n - 1;
            while (i >= 0 && ++idx[i] == cand.size()) idx[i--] = 0;
            if (i < 0) break;
        }
        return out;
    }

    out.heuristic = true;
    auto g = marginal_phi_plus(v, dist, ItemScore::Single);
    std::set<double> taus;
    for (const auto& gi : g) taus.insert(gi.begin(), gi.end());
    out.prices.assign(n, kWithheld);
    for (double tau : taus) {
        auto p = threshold_prices(v, g, tau, ItemScore::Single);
        double r = one_item_revenue(v, dist, p);
        if (r > out.revenue) {
            out.revenue = r;
            out.prices = p;
        }
    }
    return out;
}

PostedPrices srev(const MrfInstance& inst, const JointDistribution& dist) {
    if (inst.valuation.kind != ValuationKind::Additive) return srev_one_item(inst, dist);
    Valuation v(inst);
    PostedPrices out;
    out.semantics = "separate";
    for (int i = 0; i < inst.n(); ++i) {
        auto c = myerson_single(v.scalars()[i], marginal(dist, i));
        out.prices.push_back(c.price);
        out.revenue += c.revenue;
    }
    return out;
}

BundlePrice brev(const MrfInstance& inst, const JointDistribution& dist) {
    Valuation v(inst);
    const ItemSet all = full_set(inst.n());
    std::map<double, double> mass;
    std::vector<int> t(inst.n());
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!(dist.pmf[k] > 0)) continue;
        dist.decode(k, t.data());
        mass[v.value(t, all)] += dist.pmf[k];
    }
    BundlePrice b;
    double surv = 0;
    for (auto it = mass.rbegin(); it != mass.rend(); ++it) {
        surv += it->second;
        double r = it->first * surv;
        if (r >= b.revenue) {
            b.revenue = r;
            b.price = it->first;
        }
    }
    return b;
}

// ---------------------------------------------------------------- mechanisms

double Mechanism::allocation(std::size_t t, int i) const {
    double s = 0;
    for (std::size_t S = 0; S < lottery[t].size(); ++S)
        if (contains(static_cast<ItemSet>(S), i)) s += lottery[t][S];
    return s;
}

Mechanism Mechanism::null(int n, std::size_t types) {
    Mechanism m;
    m.n = n;
    m.lottery.assign(types, std::vector<double>(std::size_t(1) << n, 0.0));
    for (auto& l : m.lottery) l[0] = 1;
    m.payment.assign(types, 0.0);
    return m;
}

nlohmann::json Mechanism::to_json() const { return {{"lottery", lottery}, {"payment", payment}}; }

Mechanism Mechanism::from_json(const nlohmann::json& j, int n, std::size_t types) {
    Mechanism m;
    m.n = n;
    try {
        m.lottery = j.at("lottery").get<std::vector<std::vector<double>>>();
        m.payment = j.at("payment").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mechanism: ") + e.what());
    }
    if (m.lottery.size() != types || m.payment.size() != types)
        throw ValidationError("mechanism: expected one entry per support type");
    for (auto& l : m.lottery) {
        if (l.size() != (std::size_t(1) << n)) throw ValidationError("mechanism.lottery: expected 2^n entries per type");
        double s = 0;
        for (double x : l) {
            if (x < -1e-9) throw ValidationError("mechanism.lottery: negative probability");
            s += x;
        }
        if (std::abs(s - 1) > 1e-7) throw ValidationError("mechanism.lottery: entries must sum to 1");
    }
    return m;
}

double mechanism_revenue(const JointDistribution& dist, const Mechanism& m) {
    double r = 0;
    for (std::size_t t = 0; t < dist.size(); ++t) r += dist.pmf[t] * m.payment[t];
    return r;
}

double ic_ir_slack(const Valuation& v, const JointDistribution& dist, const Mechanism& m) {
    const std::size_t N = dist.size();
    const std::size_t nS = std::size_t(1) << dist.n();
    std::vector<std::vector<double>> val(N, std::vector<double>(nS));
    std::vector<int> t(dist.n());
    for (std::size_t k = 0; k < N; ++k) {
        dist.decode(k, t.data());
        for (std::size_t S = 0; S < nS; ++S) val[k][S] = v.value(t, static_cast<ItemSet>(S));
    }
    double worst = INFINITY;
    for (std::size_t a = 0; a < N; ++a) {
        auto util = [&](std::size_t b) {
            double u = -m.payment[b];
            for (std::size_t S = 0; S < nS; ++S) u += m.lottery[b][S] * val[a][S];
            return u;
        };
        double ua = util(a);
        worst = std::min(worst, ua);
        for (std::size_t b = 0; b < N; ++b)
            if (b != a) worst = std::min(worst, ua - util(b));
    }
    return worst;
}

OptimalMechanism opt_revenue_lp(const MrfInstance& inst, const JointDistribution& dist, const LpCaps& caps) {
    const int n = inst.n();
    const std::size_t N = dist.size();
    if (n > caps.max_items || N > caps.max_types)
        throw LpTooLarge("LP needs n <= " + std::to_string(caps.max_items) + " and |T| <= " +
                         std::to_string(caps.max_types));
    const std::size_t nS = (std::size_t(1) << n) - 1;  // nonempty sets
    // Payment enters shifted: q = p / scale + 1 >= 0. An optimal mechanism never pays
    // out more than the largest value, otherwise every type pays a negative amount.
    const std::size_t per = nS + 1;
    const std::size_t cols = N * per;
    const std::size_t rows = N * (N - 1) + 2 * N;
    if (static_cast<double>(rows) * cols > caps.max_tableau) throw LpTooLarge("LP tableau exceeds the size cap");

    Valuation v(inst);
    std::vector<std::vector<double>> val(N, std::vector<double>(nS + 1));
    std::vector<int> t(n);
    double scale = 0;
    for (std::size_t k = 0; k < N; ++k) {
        dist.decode(k, t.data());
        for (std::size_t S = 0; S <= nS; ++S) val[k][S] = v.value(t, static_cast<ItemSet>(S));
        scale = std::max(scale, val[k][nS]);
    }
    if (!(scale > 0)) scale = 1;

    Matrix A(rows, cols);
    std::vector<double> b(rows, 0.0), c(cols, 0.0);
    auto sig = [&](std::size_t k, std::size_t S) { return k * per + (S - 1); };
    auto pq = [&](std::size_t k) { return k * per + nS; };
    std::size_t r = 0;
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t bb = 0; bb < N; ++bb) {
            if (a == bb) continue;
            // u(a reports bb) - u(a) <= 0
            for (std::size_t S = 1; S <= nS; ++S) {
                A(r, sig(bb, S)) += val[a][S] / scale;
                A(r, sig(a, S)) -= val[a][S] / scale;
            }
            A(r, pq(bb)) -= 1;
            A(r, pq(a)) += 1;
            ++r;
        }
    }
    for (std::size_t a = 0; a < N; ++a, ++r) {
        for (std::size_t S = 1; S <= nS; ++S) A(r, sig(a, S)) = -val[a][S] / scale;
        A(r, pq(a)) = 1;
        b[r] = 1;
    }
    for (std::size_t a = 0; a < N; ++a, ++r) {
        for (std::size_t S = 1; S <= nS; ++S) A(r, sig(a, S)) = 1;
        b[r] = 1;
    }
    for (std::size_t a = 0; a < N; ++a) c[pq(a)] = dist.pmf[a];

    for (std::size_t i = 0; i < rows; ++i) {
        double mx = 0;
        for (std::size_t j = 0; j < cols; ++j) mx = std::max(mx, std::abs(A(i, j)));
        if (mx > 0) {
            for (std::size_t j = 0; j < cols; ++j) A(i, j) /= mx;
            b[i] /= mx;
        }
    }
    double cmax = 0;
    for (double x : c) cmax = std::max(cmax, std::abs(x));
    if (cmax > 0)
        for (double& x : c) x /= cmax;

    auto lp = simplex_max(A, b, c, 1e-9);

    OptimalMechanism out;
    out.pivots = lp.pivots;
    out.mech.n = n;
    out.mech.lottery.assign(N, std::vector<double>(nS + 1, 0.0));
    out.mech.payment.assign(N, 0.0);
    for (std::size_t a = 0; a < N; ++a) {
        double tot = 0;
        for (std::size_t S = 1; S <= nS; ++S) {
            double x = std::max(0.0, lp.x[sig(a, S)]);
            out.mech.lottery[a][S] = x;
            tot += x;
        }
        if (tot > 1) {
            for (std::size_t S = 1; S <= nS; ++S) out.mech.lottery[a][S] /= tot;
            tot = 1;
        }
        out.mech.lottery[a][0] = 1 - tot;
        out.mech.payment[a] = (lp.x[pq(a)] - 1) * scale;
    }
    out.revenue = mechanism_revenue(dist, out.mech);
    out.worst_ic_ir = ic_ir_slack(v, dist, out.mech);
    if (out.worst_ic_ir < -1e-6 * std::max(1.0, scale))
        throw LpNumericalFailure("solution violates IC/IR by " + std::to_string(-out.worst_ic_ir));
    return out;
}

// ---------------------------------------------------------------- Ronen

std::pair<double, Floor> region_floor(const std::vector<std::vector<double>>& score, const JointDistribution& dist,
                                      int i, std::size_t base) {
    double left = -INFINITY, right = -INFINITY;
    for (int j = 0; j < dist.n(); ++j) {
        if (j == i) continue;
        double x = score[j][dist.coord(base, j)];
        if (j < i) left = std::max(left, x);
        else right = std::max(right, x);
    }
    if (left >= right) return {left, Floor::Above};
    return {right, Floor::AtLeast};
}

RevenueCurve conditional_curve(const std::vector<std::vector<double>>& score, const JointDistribution& dist, int i,
                               std::size_t base, bool restrict_to_region) {
    std::vector<double> mass(dist.sizes[i]);
    for (int a = 0; a < dist.sizes[i]; ++a) mass[a] = dist.pmf[base + a * dist.strides[i]];
    if (!restrict_to_region) return myerson_single(score[i], mass, -INFINITY, Floor::AtLeast);
    auto [L, kind] = region_floor(score, dist, i, base);
    return myerson_single(score[i], mass, L, kind);
}

RonenResult ronen_copies(const Valuation& v, const JointDistribution& dist, ItemScore score) {
    const auto& sc = scores(v, score);
    RonenResult res;
    for (int i = 0; i < dist.n(); ++i) {
        for (std::size_t base = 0; base < dist.size(); ++base) {
            if (dist.coord(base, i) != 0) continue;
            if (!(context_mass(dist, i, base) > 0)) continue;
            auto curve = conditional_curve(sc, dist, i, base, true);
            res.revenue += curve.revenue;
            res.prices.push_back({i, base, curve.price});
        }
    }
    return res;
}

RonenResult ronen_copies(const MrfInstance& inst, const JointDistribution& dist) {
    Valuation v(inst);
    return ronen_copies(v, dist, default_score(v));
}

}  // namespace mechlab
