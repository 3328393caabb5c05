#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mechlab/report.hpp"

namespace mechlab {

// A symbol is a scalar value (size 1) or a clause vector for XOS items.
using Symbol = std::vector<double>;

struct ItemSpec {
    std::string name;
    std::vector<Symbol> alphabet;
    std::vector<double> node_potential;
};

struct Hyperedge {
    std::vector<int> members;
    std::vector<double> table;  // row-major over member alphabet indices
};

enum class ValuationKind { Additive, UnitDemand, ConstrainedAdditive, Xos };

struct ValuationSpec {
    ValuationKind kind = ValuationKind::Additive;
    std::vector<std::vector<int>> feasible_sets;
    int clauses = 1;
};

struct MrfInstance {
    std::vector<ItemSpec> items;
    std::vector<Hyperedge> edges;
    ValuationSpec valuation;
    nlohmann::json provenance;  // null unless set by a generator

    int n() const { return static_cast<int>(items.size()); }
    int alphabet_size(int i) const { return static_cast<int>(items[i].alphabet.size()); }
};

const char* kind_name(ValuationKind k);
ValuationKind kind_from_name(const std::string& s);

MrfInstance parse_instance(std::string_view text);
MrfInstance load_instance(const std::string& path);
nlohmann::json instance_to_json(const MrfInstance& inst);
std::string dump_instance(const MrfInstance& inst);
void save_instance(const MrfInstance& inst, const std::string& path);

// Throws ValidationError naming the offending field.
void validate(const MrfInstance& inst);

// Default 1e6, overridden by MECHLAB_SUPPORT_CAP.
std::size_t support_cap();

std::size_t edge_table_index(const MrfInstance& inst, const Hyperedge& e, const int* type);

struct JointDistribution {
    std::vector<int> sizes;
    std::vector<std::size_t> strides;  // item 0 is the most significant digit
    std::vector<double> pmf;
    double log_partition = 0;

    int n() const { return static_cast<int>(sizes.size()); }
    std::size_t size() const { return pmf.size(); }
    int coord(std::size_t idx, int i) const {
        return static_cast<int>((idx / strides[i]) % static_cast<std::size_t>(sizes[i]));
    }
    std::vector<int> type(std::size_t idx) const;
    void decode(std::size_t idx, int* out) const;
    std::size_t encode(const std::vector<int>& t) const;
    // Index of the same context with coordinate i set to 0.
    std::size_t context_base(std::size_t idx, int i) const { return idx - coord(idx, i) * strides[i]; }
};

JointDistribution joint_distribution(const MrfInstance& inst);
JointDistribution joint_distribution(const MrfInstance& inst, std::size_t cap);

std::vector<double> marginal(const JointDistribution& dist, int i);
double context_mass(const JointDistribution& dist, int i, std::size_t base);

// context is a full type; its entry at i is ignored.
std::vector<double> conditional(const JointDistribution& dist, int i, const std::vector<int>& context);

// All conditionals f_i(t_i | t_{-i}) precomputed once.
class Conditionals {
public:
    explicit Conditionals(const JointDistribution& dist);
    // Pr[t_i = coord(idx,i) | t_{-i}]; 0 when the context has zero mass.
    double prob(int i, std::size_t idx) const { return cond_[i][idx]; }
    double context_mass(int i, std::size_t idx) const { return mass_[i][idx]; }

private:
    std::vector<std::vector<double>> cond_;
    std::vector<std::vector<double>> mass_;
};

struct DependenceReport {
    std::vector<std::vector<double>> beta_matrix;
    double beta = 0;
    std::vector<double> weighted_degrees;
    double delta = 0;
    std::vector<std::vector<double>> alpha_matrix;
    double alpha = 0;
    bool has_spectral = false;
    double rho_d = 0;
    double gamma = 0;

    nlohmann::json to_json() const;
};

DependenceReport dependence_report(const MrfInstance& inst, const JointDistribution& dist);

// Delta from the potentials alone.
double max_weighted_degree(const MrfInstance& inst);

// Ratio Pr[t_i in E, t_{-i} in E'] / (Pr[t_i in E] Pr[t_{-i} in E']) against exp(+-4 Delta).
VerificationReport conditional_bound_check(const MrfInstance& inst, const JointDistribution& dist,
                                           int sampled_sets = 20);

}  // namespace mechlab
