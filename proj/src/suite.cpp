#include "mechlab/suite.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "mechlab/errors.hpp"

namespace mechlab {

std::uint64_t instance_seed(std::uint64_t master, int index) {
    // splitmix64 finalizer over (master, index)
    std::uint64_t z = master * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index) + 1;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

MrfInstance random_instance(std::uint64_t seed, int index, const SuiteOptions& opts) {
    std::mt19937_64 rng(seed);
    auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto psi = [&] { return std::uniform_real_distribution<double>(-opts.psi_max, opts.psi_max)(rng); };
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    static constexpr ValuationKind kinds[] = {ValuationKind::Additive, ValuationKind::UnitDemand,
                                              ValuationKind::ConstrainedAdditive, ValuationKind::Xos};
    MrfInstance inst;
    inst.valuation.kind = kinds[index % 4];
    const bool xos = inst.valuation.kind == ValuationKind::Xos;
    if (xos) inst.valuation.clauses = 2;
    const int width = xos ? 2 : 1;
    const int n = uniform_int(1, opts.n_max);

    for (int i = 0; i < n; ++i) {
        ItemSpec item;
        item.name = "item" + std::to_string(i);
        int size = uniform_int(1, opts.alphabet_max);
        std::set<Symbol> seen;
        while (static_cast<int>(item.alphabet.size()) < size) {
            Symbol s(width);
            for (double& x : s) x = 0.5 * uniform_int(0, 10);
            if (seen.insert(s).second) item.alphabet.push_back(s);
        }
        std::sort(item.alphabet.begin(), item.alphabet.end());
        for (int a = 0; a < size; ++a) item.node_potential.push_back(psi());
        inst.items.push_back(std::move(item));
    }
    auto add_edge = [&](std::vector<int> members) {
        std::size_t len = 1;
        for (int m : members) len *= inst.items[m].alphabet.size();
        Hyperedge e{std::move(members), std::vector<double>(len)};
        for (double& x : e.table) x = psi();
        inst.edges.push_back(std::move(e));
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(0.7)) add_edge({i, j});
    if (n == 3 && coin(0.3)) add_edge({0, 1, 2});

    if (inst.valuation.kind == ValuationKind::ConstrainedAdditive) {
        std::set<std::vector<int>> sets{{}};
        for (int i = 0; i < n; ++i) sets.insert({i});
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin(0.5)) sets.insert({i, j});
        if (n == 3 && sets.size() == 7 && coin(0.5)) sets.insert({0, 1, 2});
        inst.valuation.feasible_sets.assign(sets.begin(), sets.end());
    }
    inst.provenance = {{"generator", "suite"}, {"params", {{"seed", seed}, {"index", index}}}};
    validate(inst);
    return inst;
}

std::vector<SuiteEntry> run_suite(const SuiteOptions& opts) {
    std::vector<SuiteEntry> entries(std::max(0, opts.count));
    int workers = opts.workers > 0 ? opts.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, opts.count));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < opts.count; i = next++) {
            auto& e = entries[i];
            e.id = i;
            e.seed = instance_seed(opts.seed, i);
            try {
                e.inst = random_instance(e.seed, i, opts);
                auto dist = joint_distribution(e.inst);
                e.analysis = analyze(e.inst, dist);
            } catch (const std::exception& ex) {
                e.error = ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return entries;
}

int suite_failures(const std::vector<SuiteEntry>& entries) {
    int f = 0;
    for (const auto& e : entries) f += e.error.empty() ? static_cast<int>(e.analysis.report.failures()) : 1;
    return f;
}

nlohmann::json suite_to_json(const SuiteOptions& opts, const std::vector<SuiteEntry>& entries) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json row = {{"id", e.id}, {"seed", e.seed}};
        if (!e.error.empty()) {
            row["error"] = e.error;
        } else {
            row["kind"] = kind_name(e.inst.valuation.kind);
            row["items"] = e.inst.n();
            row["summary"] = e.analysis.summary();
            row["checks"] = e.analysis.report.checks.size();
            VerificationReport failed;
            for (const auto& c : e.analysis.report.checks)
                if (!c.pass) failed.checks.push_back(c);
            row["failures"] = failed.to_json();
        }
        list.push_back(std::move(row));
    }
    return {{"command", "suite"},
            {"params",
             {{"seed", opts.seed},
              {"count", opts.count},
              {"n_max", opts.n_max},
              {"alphabet_max", opts.alphabet_max},
              {"psi_max", opts.psi_max}}},
            {"failures", suite_failures(entries)},
            {"instances", list}};
}

}  // namespace mechlab
