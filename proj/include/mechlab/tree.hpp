#pragma once

#include <vector>

#include <json.hpp>

#include "mechlab/mrf.hpp"

namespace mechlab {

// Influence entries alpha[u][v] (row u: influence of v on u) on the edges of a forest.
struct TreeStructure {
    int n = 0;
    int root = 0;
    std::vector<int> parent;                 // -1 for roots
    std::vector<std::vector<int>> children;
    std::vector<std::vector<double>> alpha;  // n x n, nonzero only on tree edges
    std::vector<std::vector<double>> beta;   // n x n

    // Build from an undirected edge list; every component is rooted at its smallest node
    // except the component containing `root`. Edges with a zero entry in either
    // direction are dropped.
    static TreeStructure from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                    const std::vector<std::vector<double>>& alpha,
                                    const std::vector<std::vector<double>>& beta, int root = 0);
    std::vector<int> roots() const;
    // Post-order over all nodes (children before parents).
    std::vector<int> post_order() const;
};

// Pairwise instances whose interaction graph is a forest.
TreeStructure tree_from_instance(const MrfInstance& inst, const JointDistribution& dist, int root = 0);

enum class Verdict { Less, Equal, Greater };
const char* verdict_name(Verdict v);

struct KDecision {
    Verdict verdict = Verdict::Less;
    // weight[u] = w on the edge (u, parent(u)) = v_u / v_parent; 1 for roots.
    std::vector<double> weight;
};

KDecision decide_k(const TreeStructure& tree, double k);

struct KStarResult {
    double estimate = 0;
    double lo = 0, hi = 0;
    std::vector<double> weight;  // witness weights at hi
    int steps = 0;
};

KStarResult kstar_search(const TreeStructure& tree, double eps);

// Per-item metric scales v with v_u / v_parent = weight[u].
std::vector<double> scales_from_weights(const TreeStructure& tree, const std::vector<double>& weight);
// Row sums of the weighted matrix (v_i / v_j) entry_ij.
std::vector<double> weighted_row_sums(const TreeStructure& tree, const std::vector<std::vector<double>>& entries,
                                      const std::vector<double>& weight);

struct SufficientK {
    double k = 0;
    double rho = 0;  // spectral radius of the weighted influence matrix
    bool rho_le_k = true;
};

SufficientK sufficient_k(const TreeStructure& tree, const std::vector<double>& weight);

nlohmann::json kstar_report(const TreeStructure& tree, const KStarResult& res);

}  // namespace mechlab
