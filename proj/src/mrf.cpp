#include "mechlab/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mechlab/errors.hpp"

namespace mechlab {

using nlohmann::json;

const char* kind_name(ValuationKind k) {
    switch (k) {
        case ValuationKind::Additive: return "additive";
        case ValuationKind::UnitDemand: return "unit_demand";
        case ValuationKind::ConstrainedAdditive: return "constrained_additive";
        case ValuationKind::Xos: return "xos";
    }
    return "?";
}

ValuationKind kind_from_name(const std::string& s) {
    if (s == "additive") return ValuationKind::Additive;
    if (s == "unit_demand") return ValuationKind::UnitDemand;
    if (s == "constrained_additive") return ValuationKind::ConstrainedAdditive;
    if (s == "xos") return ValuationKind::Xos;
    throw ValidationError("valuation.kind: unknown kind '" + s + "'");
}

// ---------------------------------------------------------------- parsing

namespace {

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError(field + ": expected a number");
    return j.get<double>();
}

const json& require(const json& obj, const char* key, const std::string& field) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(field + "." + key + ": missing");
    return *it;
}

}  // namespace

MrfInstance parse_instance(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("document: expected an object");

    MrfInstance inst;
    const json& items = require(doc, "items", "document");
    if (!items.is_array()) throw ParseError("items: expected an array");
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::string f = "items[" + std::to_string(i) + "]";
        const json& it = items[i];
        if (!it.is_object()) throw ParseError(f + ": expected an object");
        ItemSpec spec;
        if (auto nm = it.find("name"); nm != it.end()) {
            if (!nm->is_string()) throw ParseError(f + ".name: expected a string");
            spec.name = nm->get<std::string>();
        } else {
            spec.name = "item" + std::to_string(i);
        }
        const json& alpha = require(it, "alphabet", f);
        if (!alpha.is_array()) throw ParseError(f + ".alphabet: expected an array");
        for (std::size_t a = 0; a < alpha.size(); ++a) {
            std::string fa = f + ".alphabet[" + std::to_string(a) + "]";
            Symbol s;
            if (alpha[a].is_array()) {
                for (std::size_t k = 0; k < alpha[a].size(); ++k)
                    s.push_back(get_number(alpha[a][k], fa + "[" + std::to_string(k) + "]"));
            } else {
                s.push_back(get_number(alpha[a], fa));
            }
            spec.alphabet.push_back(std::move(s));
        }
        const json& pot = require(it, "node_potential", f);
        if (!pot.is_array()) throw ParseError(f + ".node_potential: expected an array");
        for (std::size_t a = 0; a < pot.size(); ++a)
            spec.node_potential.push_back(
                get_number(pot[a], f + ".node_potential[" + std::to_string(a) + "]"));
        inst.items.push_back(std::move(spec));
    }

    if (auto ed = doc.find("edges"); ed != doc.end()) {
        if (!ed->is_array()) throw ParseError("edges: expected an array");
        for (std::size_t e = 0; e < ed->size(); ++e) {
            std::string f = "edges[" + std::to_string(e) + "]";
            const json& ej = (*ed)[e];
            if (!ej.is_object()) throw ParseError(f + ": expected an object");
            Hyperedge h;
            const json& mem = require(ej, "members", f);
            if (!mem.is_array()) throw ParseError(f + ".members: expected an array");
            for (std::size_t k = 0; k < mem.size(); ++k) {
                if (!mem[k].is_number_integer())
                    throw ParseError(f + ".members[" + std::to_string(k) + "]: expected an integer");
                h.members.push_back(mem[k].get<int>());
            }
            const json& tab = require(ej, "table", f);
            if (!tab.is_array()) throw ParseError(f + ".table: expected an array");
            for (std::size_t k = 0; k < tab.size(); ++k)
                h.table.push_back(get_number(tab[k], f + ".table[" + std::to_string(k) + "]"));
            inst.edges.push_back(std::move(h));
        }
    }

    const json& val = require(doc, "valuation", "document");
    if (!val.is_object()) throw ParseError("valuation: expected an object");
    const json& kind = require(val, "kind", "valuation");
    if (!kind.is_string()) throw ParseError("valuation.kind: expected a string");
    inst.valuation.kind = kind_from_name(kind.get<std::string>());
    if (auto fs = val.find("feasible_sets"); fs != val.end()) {
        if (!fs->is_array()) throw ParseError("valuation.feasible_sets: expected an array");
        for (std::size_t s = 0; s < fs->size(); ++s) {
            std::string f = "valuation.feasible_sets[" + std::to_string(s) + "]";
            if (!(*fs)[s].is_array()) throw ParseError(f + ": expected an array");
            std::vector<int> set;
            for (const auto& x : (*fs)[s]) {
                if (!x.is_number_integer()) throw ParseError(f + ": expected integers");
                set.push_back(x.get<int>());
            }
            inst.valuation.feasible_sets.push_back(std::move(set));
        }
    }
    if (auto cl = val.find("clauses"); cl != val.end()) {
        if (!cl->is_number_integer()) throw ParseError("valuation.clauses: expected an integer");
        inst.valuation.clauses = cl->get<int>();
    } else if (inst.valuation.kind == ValuationKind::Xos && !inst.items.empty() &&
               !inst.items[0].alphabet.empty()) {
        inst.valuation.clauses = static_cast<int>(inst.items[0].alphabet[0].size());
    }
    if (auto pv = doc.find("provenance"); pv != doc.end()) inst.provenance = *pv;

    validate(inst);
    return inst;
}

MrfInstance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open instance file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

json instance_to_json(const MrfInstance& inst) {
    json doc;
    doc["items"] = json::array();
    bool xos = inst.valuation.kind == ValuationKind::Xos;
    for (const auto& it : inst.items) {
        json a = json::array();
        for (const auto& s : it.alphabet) {
            if (xos) a.push_back(s);
            else a.push_back(s[0]);
        }
        doc["items"].push_back({{"name", it.name}, {"alphabet", a}, {"node_potential", it.node_potential}});
    }
    doc["edges"] = json::array();
    for (const auto& e : inst.edges) doc["edges"].push_back({{"members", e.members}, {"table", e.table}});
    json val = {{"kind", kind_name(inst.valuation.kind)}};
    if (inst.valuation.kind == ValuationKind::ConstrainedAdditive)
        val["feasible_sets"] = inst.valuation.feasible_sets;
    if (xos) val["clauses"] = inst.valuation.clauses;
    doc["valuation"] = val;
    if (!inst.provenance.is_null()) doc["provenance"] = inst.provenance;
    return doc;
}

std::string dump_instance(const MrfInstance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

void save_instance(const MrfInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << dump_instance(inst);
}

// ---------------------------------------------------------------- validation

void validate(const MrfInstance& inst) {
    const int n = inst.n();
    if (n == 0) throw ValidationError("items: at least one item required");
    if (n > 30) throw ValidationError("items: at most 30 items supported");
    const bool xos = inst.valuation.kind == ValuationKind::Xos;
    if (xos && inst.valuation.clauses < 1) throw ValidationError("valuation.clauses: must be >= 1");

    for (int i = 0; i < n; ++i) {
        const auto& it = inst.items[i];
        std::string f = "items[" + std::to_string(i) + "]";
        if (it.alphabet.empty()) throw ValidationError(f + ".alphabet: must be nonempty");
        if (it.node_potential.size() != it.alphabet.size())
            throw ValidationError(f + ".node_potential: length must equal alphabet size");
        for (double p : it.node_potential)
            if (!std::isfinite(p)) throw ValidationError(f + ".node_potential: entries must be finite");
        std::set<Symbol> seen;
        for (std::size_t a = 0; a < it.alphabet.size(); ++a) {
            const auto& s = it.alphabet[a];
            std::string fa = f + ".alphabet[" + std::to_string(a) + "]";
            std::size_t want = xos ? static_cast<std::size_t>(inst.valuation.clauses) : 1;
            if (s.size() != want)
                throw ValidationError(fa + (xos ? ": clause count mismatch" : ": expected a scalar"));
            for (double x : s)
                if (!std::isfinite(x) || x < 0) throw ValidationError(fa + ": values must be finite and >= 0");
            if (!seen.insert(s).second) throw ValidationError(fa + ": duplicate symbol");
        }
    }

    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const auto& h = inst.edges[e];
        std::string f = "edges[" + std::to_string(e) + "]";
        if (h.members.size() < 2) throw ValidationError(f + ".members: need at least 2 members");
        std::size_t prod = 1;
        for (std::size_t k = 0; k < h.members.size(); ++k) {
            int m = h.members[k];
            if (m < 0 || m >= n) throw ValidationError(f + ".members: index out of range");
            if (k > 0 && m <= h.members[k - 1])
                throw ValidationError(f + ".members: must be strictly increasing");
            prod *= inst.items[m].alphabet.size();
        }
        if (h.table.size() != prod)
            throw ValidationError(f + ".table: length " + std::to_string(h.table.size()) +
                                  " != product of member alphabet sizes " + std::to_string(prod));
        for (double x : h.table)
            if (!std::isfinite(x)) throw ValidationError(f + ".table: entries must be finite");
    }

    const auto& fs = inst.valuation.feasible_sets;
    if (inst.valuation.kind == ValuationKind::ConstrainedAdditive) {
        if (fs.empty()) throw ValidationError("valuation.feasible_sets: required for constrained_additive");
        std::set<std::uint32_t> masks;
        for (std::size_t s = 0; s < fs.size(); ++s) {
            std::uint32_t m = 0;
            for (int x : fs[s]) {
                if (x < 0 || x >= n)
                    throw ValidationError("valuation.feasible_sets[" + std::to_string(s) + "]: index out of range");
                if (m & (1u << x))
                    throw ValidationError("valuation.feasible_sets[" + std::to_string(s) + "]: duplicate index");
                m |= 1u << x;
            }
            masks.insert(m);
        }
        for (std::uint32_t m : masks) {
            for (int x = 0; x < n; ++x) {
                if ((m & (1u << x)) && !masks.count(m & ~(1u << x)))
                    throw ValidationError("valuation.feasible_sets: not downward closed (a subset of a listed set is missing)");
            }
        }
        if (!masks.count(0)) throw ValidationError("valuation.feasible_sets: must contain the empty set");
    } else if (!fs.empty()) {
        throw ValidationError("valuation.feasible_sets: only allowed for constrained_additive");
    }
}

std::size_t support_cap() {
    if (const char* env = std::getenv("MECHLAB_SUPPORT_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 1000000;
}

// ---------------------------------------------------------------- joint

std::size_t edge_table_index(const MrfInstance& inst, const Hyperedge& e, const int* type) {
    std::size_t idx = 0;
    for (int m : e.members) idx = idx * inst.items[m].alphabet.size() + static_cast<std::size_t>(type[m]);
    return idx;
}

std::vector<int> JointDistribution::type(std::size_t idx) const {
    std::vector<int> t(sizes.size());
    decode(idx, t.data());
    return t;
}

void JointDistribution::decode(std::size_t idx, int* out) const {
    for (int i = 0; i < n(); ++i) out[i] = coord(idx, i);
}

std::size_t JointDistribution::encode(const std::vector<int>& t) const {
    std::size_t idx = 0;
    for (int i = 0; i < n(); ++i) idx += static_cast<std::size_t>(t[i]) * strides[i];
    return idx;
}

namespace {

// Odometer over the product space in lexicographic order; calls f(idx, type).
template <class F>
void for_each_type(const std::vector<int>& sizes, F&& f) {
    const int n = static_cast<int>(sizes.size());
    std::vector<int> t(n, 0);
    std::size_t idx = 0;
    while (true) {
        f(idx, t.data());
        ++idx;
        int i = n - 1;
        while (i >= 0 && ++t[i] == sizes[i]) t[i--] = 0;
        if (i < 0) break;
    }
}

std::vector<int> sizes_of(const MrfInstance& inst) {
    std::vector<int> s;
    for (const auto& it : inst.items) s.push_back(static_cast<int>(it.alphabet.size()));
    return s;
}

}  // namespace

JointDistribution joint_distribution(const MrfInstance& inst) { return joint_distribution(inst, support_cap()); }

JointDistribution joint_distribution(const MrfInstance& inst, std::size_t cap) {
    JointDistribution d;
    d.sizes = sizes_of(inst);
    const int n = inst.n();
    d.strides.assign(n, 1);
    double total = 1;
    for (int i = n - 1; i >= 0; --i) {
        if (i < n - 1) d.strides[i] = d.strides[i + 1] * static_cast<std::size_t>(d.sizes[i + 1]);
        total *= d.sizes[i];
    }
    if (total > static_cast<double>(cap))
        throw SupportTooLarge("support size " + std::to_string(static_cast<long double>(total)) +
                              " exceeds cap " + std::to_string(cap));
    std::vector<double> logw(static_cast<std::size_t>(total));
    for_each_type(d.sizes, [&](std::size_t idx, const int* t) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += inst.items[i].node_potential[t[i]];
        for (const auto& e : inst.edges) s += e.table[edge_table_index(inst, e, t)];
        logw[idx] = s;
    });
    double mx = *std::max_element(logw.begin(), logw.end());
    double acc = 0;
    for (double l : logw) acc += std::exp(l - mx);
    d.log_partition = mx + std::log(acc);
    d.pmf.resize(logw.size());
    for (std::size_t k = 0; k < logw.size(); ++k) d.pmf[k] = std::exp(logw[k] - d.log_partition);
    return d;
}

std::vector<double> marginal(const JointDistribution& dist, int i) {
    std::vector<double> m(dist.sizes[i], 0.0);
    for (std::size_t k = 0; k < dist.size(); ++k) m[dist.coord(k, i)] += dist.pmf[k];
    return m;
}

double context_mass(const JointDistribution& dist, int i, std::size_t base) {
    double s = 0;
    for (int a = 0; a < dist.sizes[i]; ++a) s += dist.pmf[base + a * dist.strides[i]];
    return s;
}

std::vector<double> conditional(const JointDistribution& dist, int i, const std::vector<int>& context) {
    std::vector<int> t = context;
    t[i] = 0;
    std::size_t base = dist.encode(t);
    double m = context_mass(dist, i, base);
    if (!(m > 0)) throw ZeroProbabilityContext("item " + std::to_string(i) + ": context has zero probability");
    std::vector<double> c(dist.sizes[i]);
    for (int a = 0; a < dist.sizes[i]; ++a) c[a] = dist.pmf[base + a * dist.strides[i]] / m;
    return c;
}

Conditionals::Conditionals(const JointDistribution& dist) {
    const int n = dist.n();
    cond_.assign(n, std::vector<double>(dist.size(), 0.0));
    mass_.assign(n, std::vector<double>(dist.size(), 0.0));
    for (int i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < dist.size(); ++k) {
            if (dist.coord(k, i) != 0) continue;
            double m = mechlab::context_mass(dist, i, k);
            for (int a = 0; a < dist.sizes[i]; ++a) {
                std::size_t idx = k + a * dist.strides[i];
                mass_[i][idx] = m;
                cond_[i][idx] = m > 0 ? dist.pmf[idx] / m : 0.0;
            }
        }
    }
}

// ---------------------------------------------------------------- dependence

namespace {

void potential_degrees(const MrfInstance& inst, std::vector<std::vector<double>>& beta, std::vector<double>& d) {
    const int n = inst.n();
    beta.assign(n, std::vector<double>(n, 0.0));
    d.assign(n, 0.0);
    if (inst.edges.empty()) return;
    // Only the items touched by edges matter; enumerate their joint configurations.
    std::vector<int> touched;
    for (int i = 0; i < n; ++i)
        for (const auto& e : inst.edges)
            if (std::find(e.members.begin(), e.members.end(), i) != e.members.end()) {
                touched.push_back(i);
                break;
            }
    std::vector<int> sub_sizes;
    for (int i : touched) sub_sizes.push_back(inst.alphabet_size(i));
    std::vector<int> full(n, 0);
    std::vector<double> ev(inst.edges.size());
    for_each_type(sub_sizes, [&](std::size_t, const int* t) {
        for (std::size_t k = 0; k < touched.size(); ++k) full[touched[k]] = t[k];
        for (std::size_t e = 0; e < inst.edges.size(); ++e)
            ev[e] = inst.edges[e].table[edge_table_index(inst, inst.edges[e], full.data())];
        for (int i : touched) {
            double s = 0;
            for (std::size_t e = 0; e < inst.edges.size(); ++e) {
                const auto& m = inst.edges[e].members;
                if (std::find(m.begin(), m.end(), i) != m.end()) s += ev[e];
            }
            d[i] = std::max(d[i], std::abs(s));
            for (int j : touched) {
                if (j == i) continue;
                double sij = 0;
                for (std::size_t e = 0; e < inst.edges.size(); ++e) {
                    const auto& m = inst.edges[e].members;
                    if (std::find(m.begin(), m.end(), i) != m.end() &&
                        std::find(m.begin(), m.end(), j) != m.end())
                        sij += ev[e];
                }
                beta[i][j] = std::max(beta[i][j], std::abs(sij));
            }
        }
    });
}

}  // namespace

double max_weighted_degree(const MrfInstance& inst) {
    std::vector<std::vector<double>> b;
    std::vector<double> d;
    potential_degrees(inst, b, d);
    return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

DependenceReport dependence_report(const MrfInstance& inst, const JointDistribution& dist) {
    DependenceReport r;
    const int n = inst.n();
    potential_degrees(inst, r.beta_matrix, r.weighted_degrees);
    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int j = 0; j < n; ++j) row += r.beta_matrix[i][j];
        r.beta = std::max(r.beta, row);
        r.delta = std::max(r.delta, r.weighted_degrees[i]);
    }

    r.alpha_matrix.assign(n, std::vector<double>(n, 0.0));
    if (!inst.edges.empty()) {
        double work = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (j != i) work += static_cast<double>(dist.size()) / dist.sizes[i] * dist.sizes[j];
        if (work > 1e8) throw SupportTooLarge("alpha enumeration exceeds the context-pair cap");
        for (int i = 0; i < n; ++i) {
            const std::size_t si = dist.strides[i];
            for (std::size_t base = 0; base < dist.size(); ++base) {
                if (dist.coord(base, i) != 0) continue;
                double m1 = context_mass(dist, i, base);
                if (!(m1 > 0)) continue;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    int cj = dist.coord(base, j);
                    for (int b = cj + 1; b < dist.sizes[j]; ++b) {
                        std::size_t other = base + (b - cj) * dist.strides[j];
                        double m2 = context_mass(dist, i, other);
                        if (!(m2 > 0)) continue;
                        double tv = 0;
                        for (int a = 0; a < dist.sizes[i]; ++a)
                            tv += std::abs(dist.pmf[base + a * si] / m1 - dist.pmf[other + a * si] / m2);
                        r.alpha_matrix[i][j] = std::max(r.alpha_matrix[i][j], 0.5 * tv);
                    }
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int j = 0; j < n; ++j) row += r.alpha_matrix[i][j];
        r.alpha = std::max(r.alpha, row);
    }
    return r;
}

json DependenceReport::to_json() const {
    json j = {{"beta_matrix", beta_matrix}, {"beta", beta},           {"weighted_degrees", weighted_degrees},
              {"delta", delta},             {"alpha_matrix", alpha_matrix}, {"alpha", alpha},
              {"alpha_contexts", "positive-probability contexts only"}};
    if (has_spectral) {
        j["rho_d"] = rho_d;
        j["gamma"] = gamma;
    }
    return j;
}

// ---------------------------------------------------------------- ratio check

VerificationReport conditional_bound_check(const MrfInstance& inst, const JointDistribution& dist,
                                           int sampled_sets) {
    const double delta = max_weighted_degree(inst);
    const double hi = std::exp(4 * delta), lo = std::exp(-4 * delta);
    const int n = dist.n();
    double worst_hi = 1, worst_lo = 1;
    std::string where_hi = "none", where_lo = "none";

    auto describe = [&](int i, const std::string& e, const std::string& ep) {
        return "item " + std::to_string(i) + ", E=" + e + ", E'=" + ep;
    };
    auto type_str = [&](std::size_t base, int i) {
        std::string s = "(";
        for (int j = 0; j < n; ++j) {
            if (j) s += ",";
            s += j == i ? "*" : std::to_string(dist.coord(base, j));
        }
        return s + ")";
    };
    auto consider = [&](double ratio, const std::string& where) {
        if (ratio > worst_hi) {
            worst_hi = ratio;
            where_hi = where;
        }
        if (ratio < worst_lo) {
            worst_lo = ratio;
            where_lo = where;
        }
    };

    for (int i = 0; i < n; ++i) {
        auto fi = marginal(dist, i);
        for (std::size_t base = 0; base < dist.size(); ++base) {
            if (dist.coord(base, i) != 0) continue;
            double fc = context_mass(dist, i, base);
            if (!(fc > 0)) continue;
            for (int a = 0; a < dist.sizes[i]; ++a) {
                if (!(fi[a] > 0)) continue;
                double ratio = dist.pmf[base + a * dist.strides[i]] / (fi[a] * fc);
                consider(ratio, describe(i, "{" + std::to_string(a) + "}", "{" + type_str(base, i) + "}"));
            }
        }
    }

    // Larger sets drawn with a fixed seed.
    std::mt19937_64 rng(0x5eed);
    for (int i = 0; i < n && n > 1; ++i) {
        std::vector<std::size_t> bases;
        for (std::size_t k = 0; k < dist.size(); ++k)
            if (dist.coord(k, i) == 0) bases.push_back(k);
        for (int s = 0; s < sampled_sets; ++s) {
            std::vector<int> E;
            for (int a = 0; a < dist.sizes[i]; ++a)
                if (rng() & 1) E.push_back(a);
            std::vector<std::size_t> Ep;
            for (auto b : bases)
                if (rng() & 1) Ep.push_back(b);
            if (E.empty() || Ep.empty()) continue;
            double joint = 0, pe = 0, pep = 0;
            auto fi = marginal(dist, i);
            for (int a : E) pe += fi[a];
            for (auto b : Ep) {
                pep += context_mass(dist, i, b);
                for (int a : E) joint += dist.pmf[b + a * dist.strides[i]];
            }
            if (!(pe > 0 && pep > 0)) continue;
            consider(joint / (pe * pep), describe(i, "sampled set #" + std::to_string(s), "sampled"));
        }
    }

    VerificationReport rep;
    rep.add_le("cond_ratio_upper", worst_hi, hi, "worst at " + where_hi, 0, 1e-9);
    rep.add_le("cond_ratio_lower", lo, worst_lo, "worst at " + where_lo, 0, 1e-9);
    return rep;
}

}  // namespace mechlab
