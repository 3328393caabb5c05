#pragma once

#include <cstdint>
#include <vector>

#include "mechlab/mrf.hpp"

namespace mechlab {

using ItemSet = std::uint32_t;

inline ItemSet full_set(int n) { return n >= 32 ? ~0u : ((1u << n) - 1u); }
inline bool contains(ItemSet s, int i) { return (s >> i) & 1u; }

class Valuation {
public:
    explicit Valuation(const MrfInstance& inst);

    ValuationKind kind() const { return kind_; }
    int n() const { return n_; }
    bool additive_family() const { return kind_ != ValuationKind::Xos; }

    double value(const int* type, ItemSet s) const;
    double value(const std::vector<int>& type, ItemSet s) const { return value(type.data(), s); }

    // V_i(t_i) = v(t, {i}).
    double single(int i, int a) const { return single_[i][a]; }
    // First symbol coordinate; the item's value for scalar alphabets.
    double scalar(int i, int a) const { return scalar_[i][a]; }

    const std::vector<std::vector<double>>& singles() const { return single_; }
    const std::vector<std::vector<double>>& scalars() const { return scalar_; }

private:
    ValuationKind kind_;
    int n_;
    int clauses_;
    std::vector<std::vector<Symbol>> symbols_;
    std::vector<ItemSet> feasible_;
    std::vector<std::vector<double>> single_;
    std::vector<std::vector<double>> scalar_;
};

// Per-item score used to rank items: V_i for XOS semantics, t_i for the
// constrained-additive benchmark.
enum class ItemScore { Single, Scalar };

const std::vector<std::vector<double>>& scores(const Valuation& v, ItemScore s);

// Smallest index attaining the maximum.
int favorite(const double* vals, int n);

struct Classification {
    std::vector<std::vector<double>> V;  // [item][alphabet index]
    std::vector<int> region;             // per support index
    std::vector<ItemSet> truncated;      // C(t) = {i : V_i(t) < cutoff}
};

Classification classify(const Valuation& v, const JointDistribution& dist, double cutoff,
                        ItemScore score = ItemScore::Single);

}  // namespace mechlab
