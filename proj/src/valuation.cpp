#include "mechlab/valuation.hpp"

#include <algorithm>

namespace mechlab {

Valuation::Valuation(const MrfInstance& inst)
    : kind_(inst.valuation.kind), n_(inst.n()), clauses_(inst.valuation.clauses) {
    for (const auto& it : inst.items) symbols_.push_back(it.alphabet);
    if (kind_ == ValuationKind::ConstrainedAdditive) {
        for (const auto& s : inst.valuation.feasible_sets) {
            ItemSet m = 0;
            for (int x : s) m |= 1u << x;
            feasible_.push_back(m);
        }
        std::sort(feasible_.begin(), feasible_.end());
        feasible_.erase(std::unique(feasible_.begin(), feasible_.end()), feasible_.end());
    }
    single_.resize(n_);
    scalar_.resize(n_);
    std::vector<int> t(n_, 0);
    for (int i = 0; i < n_; ++i) {
        for (std::size_t a = 0; a < symbols_[i].size(); ++a) {
            scalar_[i].push_back(symbols_[i][a][0]);
            t[i] = static_cast<int>(a);
            single_[i].push_back(value(t.data(), 1u << i));
        }
        t[i] = 0;
    }
}

double Valuation::value(const int* type, ItemSet s) const {
    switch (kind_) {
        case ValuationKind::Additive: {
            double sum = 0;
            for (int i = 0; i < n_; ++i)
                if (contains(s, i)) sum += symbols_[i][type[i]][0];
            return sum;
        }
        case ValuationKind::UnitDemand: {
            double best = 0;
            for (int i = 0; i < n_; ++i)
                if (contains(s, i)) best = std::max(best, symbols_[i][type[i]][0]);
            return best;
        }
        case ValuationKind::ConstrainedAdditive: {
            double best = 0;
            for (ItemSet f : feasible_) {
                if ((f & s) != f) continue;
                double sum = 0;
                for (int i = 0; i < n_; ++i)
                    if (contains(f, i)) sum += symbols_[i][type[i]][0];
                best = std::max(best, sum);
            }
            return best;
        }
        case ValuationKind::Xos: {
            double best = 0;
            for (int k = 0; k < clauses_; ++k) {
                double sum = 0;
                for (int i = 0; i < n_; ++i)
                    if (contains(s, i)) sum += symbols_[i][type[i]][k];
                best = std::max(best, sum);
            }
            return best;
        }
    }
    return 0;
}

const std::vector<std::vector<double>>& scores(const Valuation& v, ItemScore s) {
    return s == ItemScore::Single ? v.singles() : v.scalars();
}

int favorite(const double* vals, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (vals[i] > vals[best]) best = i;
    return best;
}

Classification classify(const Valuation& v, const JointDistribution& dist, double cutoff, ItemScore score) {
    Classification c;
    const int n = dist.n();
    c.V = scores(v, score);
    c.region.resize(dist.size());
    c.truncated.resize(dist.size());
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < dist.size(); ++k) {
        ItemSet C = 0;
        for (int i = 0; i < n; ++i) {
            vals[i] = c.V[i][dist.coord(k, i)];
            if (vals[i] < cutoff) C |= 1u << i;
        }
        c.region[k] = favorite(vals.data(), n);
        c.truncated[k] = C;
    }
    return c;
}

}  // namespace mechlab
