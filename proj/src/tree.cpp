#include "mechlab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mechlab/errors.hpp"
#include "mechlab/linalg.hpp"

namespace mechlab {

TreeStructure TreeStructure::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                        const std::vector<std::vector<double>>& alpha,
                                        const std::vector<std::vector<double>>& beta, int root) {
    if (root < 0 || root >= n) throw ValidationError("root: index out of range");
    std::vector<int> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw ValidationError("edges: invalid tree edge");
        int a = find(u), b = find(v);
        if (a == b) throw ValidationError("edges: interaction graph is not a tree");
        uf[a] = b;
    }

    TreeStructure t;
    t.n = n;
    t.root = root;
    t.alpha = alpha;
    t.beta = beta;
    t.parent.assign(n, -1);
    t.children.assign(n, {});
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        if (!(alpha[u][v] > 0 && alpha[v][u] > 0)) continue;  // contracted: imposes no constraint
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    std::vector<char> seen(n, 0);
    std::vector<int> starts{root};
    for (int i = 0; i < n; ++i)
        if (i != root) starts.push_back(i);
    for (int s : starts) {
        if (seen[s]) continue;
        seen[s] = 1;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                t.parent[v] = u;
                t.children[u].push_back(v);
                stack.push_back(v);
            }
        }
    }
    return t;
}

std::vector<int> TreeStructure::roots() const {
    std::vector<int> r;
    if (n > 0) r.push_back(root);
    for (int i = 0; i < n; ++i)
        if (parent[i] < 0 && i != root) r.push_back(i);
    return r;
}

std::vector<int> TreeStructure::post_order() const {
    std::vector<int> out;
    for (int r : roots()) {
        std::vector<std::pair<int, bool>> stack{{r, false}};
        while (!stack.empty()) {
            auto [u, done] = stack.back();
            stack.pop_back();
            if (done) {
                out.push_back(u);
                continue;
            }
            stack.push_back({u, true});
            for (auto it = children[u].rbegin(); it != children[u].rend(); ++it) stack.push_back({*it, false});
        }
    }
    return out;
}

TreeStructure tree_from_instance(const MrfInstance& inst, const JointDistribution& dist, int root) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const auto& m = inst.edges[e].members;
        if (m.size() != 2) throw ValidationError("edges[" + std::to_string(e) + "]: tree module needs pairwise edges");
        std::pair<int, int> p{m[0], m[1]};
        if (std::find(edges.begin(), edges.end(), p) == edges.end()) edges.push_back(p);
    }
    auto dep = dependence_report(inst, dist);
    return TreeStructure::from_edges(inst.n(), edges, dep.alpha_matrix, dep.beta_matrix, root);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Less: return "less";
        case Verdict::Equal: return "equal";
        case Verdict::Greater: return "greater";
    }
    return "?";
}

KDecision decide_k(const TreeStructure& tree, double k) {
    KDecision d;
    d.weight.assign(tree.n, 1.0);
    bool any_equal = false;
    for (int u : tree.post_order()) {
        double s = 0;
        for (int c : tree.children[u]) s += tree.alpha[u][c] / d.weight[c];
        int p = tree.parent[u];
        if (p >= 0) {
            if (k - s <= 0) {
                d.verdict = Verdict::Less;
                return d;
            }
            d.weight[u] = (k - s) / tree.alpha[u][p];
        } else {
            if (std::abs(s - k) <= 1e-9) any_equal = true;
            else if (s > k) {
                d.verdict = Verdict::Less;
                return d;
            }
        }
    }
    d.verdict = any_equal ? Verdict::Equal : Verdict::Greater;
    return d;
}

KStarResult kstar_search(const TreeStructure& tree, double eps) {
    KStarResult r;
    double hi = 0;
    for (int u = 0; u < tree.n; ++u) {
        double row = 0;
        for (int v = 0; v < tree.n; ++v)
            if (v != u && (tree.parent[u] == v || tree.parent[v] == u)) row += tree.alpha[u][v];
        hi = std::max(hi, row);
    }
    double lo = 0;
    while (hi - lo > eps) {
        double mid = 0.5 * (lo + hi);
        auto d = decide_k(tree, mid);
        ++r.steps;
        if (d.verdict == Verdict::Less) lo = mid;
        else if (d.verdict == Verdict::Greater) hi = mid;
        else {
            lo = hi = mid;
        }
    }
    r.lo = lo;
    r.hi = hi;
    r.estimate = 0.5 * (lo + hi);
    r.weight = hi > 0 ? decide_k(tree, hi).weight : std::vector<double>(tree.n, 1.0);
    return r;
}

std::vector<double> scales_from_weights(const TreeStructure& tree, const std::vector<double>& weight) {
    std::vector<double> v(tree.n, 1.0);
    auto order = tree.post_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        if (tree.parent[u] >= 0) v[u] = weight[u] * v[tree.parent[u]];
    }
    return v;
}

std::vector<double> weighted_row_sums(const TreeStructure& tree, const std::vector<std::vector<double>>& entries,
                                      const std::vector<double>& weight) {
    auto v = scales_from_weights(tree, weight);
    std::vector<double> rows(tree.n, 0.0);
    for (int i = 0; i < tree.n; ++i)
        for (int j = 0; j < tree.n; ++j)
            if (i != j) rows[i] += v[i] / v[j] * entries[i][j];
    return rows;
}

SufficientK sufficient_k(const TreeStructure& tree, const std::vector<double>& weight) {
    SufficientK s;
    for (double w : weight)
        if (!(w > 0)) throw NonPositiveScale("edge weights must be positive");
    for (double row : weighted_row_sums(tree, tree.beta, weight)) s.k = std::max(s.k, row);
    auto v = scales_from_weights(tree, weight);
    Matrix a(tree.n, tree.n);
    for (int i = 0; i < tree.n; ++i)
        for (int j = 0; j < tree.n; ++j)
            if (i != j) a(i, j) = v[i] / v[j] * tree.alpha[i][j];
    s.rho = spectral_radius_nonneg(a).rho;
    s.rho_le_k = s.rho <= s.k + 1e-9;
    return s;
}

nlohmann::json kstar_report(const TreeStructure& tree, const KStarResult& res) {
    return {{"kstar", res.estimate},
            {"interval", {res.lo, res.hi}},
            {"root", tree.root},
            {"parent", tree.parent},
            {"witness_weights", res.weight},
            {"equal_verdict", "tolerance 1e-9 on the root row sum"}};
}

}  // namespace mechlab
