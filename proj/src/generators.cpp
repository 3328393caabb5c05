#include "mechlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "mechlab/errors.hpp"

namespace mechlab {

namespace {

// Two-item instance with unit node potentials and psi_12 = ln pmf'' for
// pmf'' = a' joint + (1 - a') (m1 x m2).
MrfInstance mix_joint(const std::vector<ItemSpec>& items, const std::vector<double>& joint, const ValuationSpec& val,
                      double alpha_prime, nlohmann::json& meta) {
    const std::size_t s1 = items[0].alphabet.size(), s2 = items[1].alphabet.size();
    std::vector<double> m1(s1, 0.0), m2(s2, 0.0);
    for (std::size_t a = 0; a < s1; ++a)
        for (std::size_t b = 0; b < s2; ++b) {
            m1[a] += joint[a * s2 + b];
            m2[b] += joint[a * s2 + b];
        }
    double p = 1.0;
    for (double x : m1) p = std::min(p, x);
    for (double x : m2) p = std::min(p, x);

    MrfInstance out;
    out.valuation = val;
    for (const auto& it : items) {
        ItemSpec s{it.name, it.alphabet, std::vector<double>(it.alphabet.size(), 1.0)};
        out.items.push_back(std::move(s));
    }
    Hyperedge e{{0, 1}, std::vector<double>(s1 * s2)};
    for (std::size_t a = 0; a < s1; ++a)
        for (std::size_t b = 0; b < s2; ++b) {
            double q = alpha_prime * joint[a * s2 + b] + (1 - alpha_prime) * m1[a] * m2[b];
            if (!(q > 0))
                throw DegenerateSupport("type (" + std::to_string(a) + "," + std::to_string(b) +
                                        ") has zero probability after mixing");
            e.table[a * s2 + b] = std::log(q);
        }
    out.edges.push_back(std::move(e));
    double bound = std::abs(std::log((1 - alpha_prime) * p * p));
    meta["min_marginal_probability"] = p;
    meta["delta_bound"] = std::isfinite(bound) ? nlohmann::json(bound) : nlohmann::json("inf");
    return out;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

}  // namespace

MrfInstance gen_mix(const MrfInstance& base, double alpha_prime) {
    require(base.n() == 2, "items: mixing needs exactly two items");
    require(alpha_prime >= 0 && alpha_prime <= 1, "alpha_prime: must lie in [0, 1]");
    auto dist = joint_distribution(base);
    nlohmann::json meta;
    auto out = mix_joint(base.items, dist.pmf, base.valuation, alpha_prime, meta);
    out.provenance = {{"generator", "mix"}, {"params", {{"alpha_prime", alpha_prime}}}};
    out.provenance.update(meta);
    return out;
}

MrfInstance gen_copies(int n, double beta, int k, double eps_scale) {
    require(n >= 1, "n: must be positive");
    require(k >= 1, "k: must be positive");
    require(beta >= 0 && std::isfinite(beta), "beta: must be finite and nonnegative");
    if (eps_scale <= 0) eps_scale = 1e-3 / (2.0 * n * k);
    double kn = std::pow(static_cast<double>(k), n);
    if (kn * kn > static_cast<double>(support_cap()) || kn > 1023)
        throw SupportTooLarge("k^n = " + std::to_string(static_cast<long long>(kn)) + " exceeds the enumeration cap");
    const int size = static_cast<int>(kn);

    MrfInstance inst;
    ItemSpec first;
    first.name = "base";
    for (int i = 0; i < size; ++i) {
        first.alphabet.push_back({std::ldexp(1.0, i)});
        int e = i < size - 1 ? i + 1 : i;
        first.node_potential.push_back(-e * std::numbers::ln2);
    }
    inst.items.push_back(std::move(first));
    double aux_pot = std::log(1.0 / (std::exp(beta) + (k - 1) * std::exp(-beta)));
    for (int j = 1; j <= n; ++j) {
        ItemSpec aux;
        aux.name = "aux" + std::to_string(j);
        for (int l = 1; l <= k; ++l) {
            aux.alphabet.push_back({l * eps_scale});
            aux.node_potential.push_back(aux_pot);
        }
        inst.items.push_back(std::move(aux));
    }
    for (int j = 1; j <= n; ++j) {
        Hyperedge e{{0, j}, std::vector<double>(static_cast<std::size_t>(size) * k)};
        for (int i = 0; i < size; ++i) {
            int digit = i;
            for (int d = 1; d < j; ++d) digit /= k;
            digit %= k;
            for (int l = 0; l < k; ++l) e.table[static_cast<std::size_t>(i) * k + l] = l == digit ? beta : -beta;
        }
        inst.edges.push_back(std::move(e));
    }
    inst.valuation.kind = ValuationKind::Additive;
    inst.provenance = {{"generator", "copies"},
                       {"params", {{"n", n}, {"beta", beta}, {"k", k}, {"eps_scale", eps_scale}}},
                       {"bijection", "base-k digits of log2 t_1, aux item j takes digit j-1"}};
    return inst;
}

nlohmann::json ShellSequence::to_json() const {
    nlohmann::json pts = nlohmann::json::array(), xs = nlohmann::json::array();
    for (const auto& g : points) pts.push_back({g[0], g[1]});
    for (const auto& x : types) xs.push_back({x[0], x[1]});
    return {{"points", pts}, {"shell", shell}, {"gap", gap},   {"c1", c1},
            {"t_ratio", t_ratio}, {"t", t}, {"types", xs}, {"xi", xi},
            {"prob", prob}, {"realized_c", realized_c},
            {"angles", "pi/4 + j (pi/2) / ceil(N^(3/4)) wrapped into [0, pi/2)"}};
}

ShellSequence shell_sequence(int m) {
    require(m >= 1, "m: must be positive");
    ShellSequence s;
    s.points.push_back({0.0, 0.0});
    s.shell.push_back(0);
    double partial = 0;
    for (int N = 1; static_cast<int>(s.points.size()) <= m; ++N) {
        partial += std::pow(N, -1.5);
        double r = partial / kZeta32;
        int K = static_cast<int>(std::ceil(std::pow(N, 0.75) - 1e-9));
        for (int j = 0; j < K && static_cast<int>(s.points.size()) <= m; ++j) {
            double th = std::fmod(std::numbers::pi / 4 + j * (std::numbers::pi / 2) / K, std::numbers::pi / 2);
            s.points.push_back({r * std::cos(th), r * std::sin(th)});
            s.shell.push_back(N);
        }
    }
    auto dot = [](const std::array<double, 2>& a, const std::array<double, 2>& b) { return a[0] * b[0] + a[1] * b[1]; };
    s.gap.assign(m + 1, 0.0);
    std::vector<double> ratio(m + 1, 0.0);
    for (int i = 1; i <= m; ++i) {
        const auto& g = s.points[i];
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < i; ++j) {
            std::array<double, 2> d{g[0] - s.points[j][0], g[1] - s.points[j][1]};
            best = std::min(best, dot(d, g));
        }
        s.gap[i] = best;
        ratio[i] = (g[0] + g[1]) / best;
    }
    s.c1 = 1.0;
    if (m >= 2) {
        s.c1 = std::numeric_limits<double>::infinity();
        for (int i = 2; i <= m; ++i) s.c1 = std::min(s.c1, ratio[i] / ratio[i - 1]);
    }
    s.t_ratio = std::max(2.0 / s.c1, 2.0);
    double t = 1.0;
    for (int i = 1; i <= m; ++i) {
        s.t.push_back(t);
        const auto& g = s.points[i];
        s.types.push_back({t * g[0] / s.gap[i], t * g[1] / s.gap[i]});
        s.xi.push_back(t * ratio[i]);
        t *= s.t_ratio;
    }
    for (int i = 0; i < m; ++i) {
        double next = i + 1 < m ? s.xi[0] / s.xi[i + 1] : 0.0;
        s.prob.push_back(s.xi[0] / s.xi[i] - next);
        if (i > 0) s.realized_c = std::max(s.realized_c, s.xi[i] / s.xi[i - 1]);
    }
    return s;
}

MrfInstance gen_shells(int m, double c_target, ShellSequence* seq) {
    auto s = shell_sequence(m);
    std::array<std::vector<double>, 2> vals;
    for (int c = 0; c < 2; ++c) {
        std::set<double> d;
        for (const auto& x : s.types) d.insert(x[c]);
        vals[c].assign(d.begin(), d.end());
    }
    std::vector<ItemSpec> items(2);
    for (int c = 0; c < 2; ++c) {
        items[c].name = c == 0 ? "first" : "second";
        for (double v : vals[c]) items[c].alphabet.push_back({v});
    }
    const std::size_t s2 = vals[1].size();
    std::vector<double> joint(vals[0].size() * s2, 0.0);
    for (int i = 0; i < m; ++i) {
        auto a = std::lower_bound(vals[0].begin(), vals[0].end(), s.types[i][0]) - vals[0].begin();
        auto b = std::lower_bound(vals[1].begin(), vals[1].end(), s.types[i][1]) - vals[1].begin();
        joint[a * s2 + b] += s.prob[i];
    }
    ValuationSpec val;
    val.kind = ValuationKind::Additive;
    nlohmann::json meta;
    auto out = mix_joint(items, joint, val, 0.5, meta);
    out.provenance = {{"generator", "shells"}, {"params", {{"m", m}, {"c_target", c_target}}}};
    out.provenance.update(meta);
    out.provenance["realized_c"] = s.realized_c;
    out.provenance["c1"] = s.c1;
    out.provenance["t_ratio"] = s.t_ratio;
    if (c_target > 0) out.provenance["within_c_target"] = s.realized_c <= c_target;
    out.provenance["sequence"] = s.to_json();
    if (seq) *seq = std::move(s);
    return out;
}

MrfInstance reduce_3wise(const MrfInstance& base, double beta_prime) {
    require(beta_prime > 0 && std::isfinite(beta_prime), "beta_prime: must be positive");
    double beta = 0;
    for (std::size_t e = 0; e < base.edges.size(); ++e) {
        require(base.edges[e].members.size() == 2, "edges[" + std::to_string(e) + "]: base must be pairwise");
        for (double x : base.edges[e].table) beta = std::max(beta, std::abs(x));
    }
    int K = std::max(1, static_cast<int>(std::ceil(beta / beta_prime - 1e-9)));
    MrfInstance out;
    out.items = base.items;
    out.valuation = base.valuation;
    const int n = base.n();
    const std::size_t width = base.valuation.kind == ValuationKind::Xos ? base.valuation.clauses : 1;
    for (int a = 0; a < K; ++a) {
        ItemSpec aux;
        aux.name = "aux" + std::to_string(a);
        aux.alphabet.push_back(Symbol(width, 0.0));
        aux.node_potential.push_back(0.0);
        out.items.push_back(std::move(aux));
    }
    for (const auto& e : base.edges)
        for (int a = 0; a < K; ++a) {
            Hyperedge h{{e.members[0], e.members[1], n + a}, e.table};
            for (double& x : h.table) x /= K;
            out.edges.push_back(std::move(h));
        }
    out.provenance = {{"generator", "3wise"},
                      {"params", {{"beta_prime", beta_prime}}},
                      {"base_beta", beta},
                      {"auxiliary_items", K}};
    return out;
}

}  // namespace mechlab
