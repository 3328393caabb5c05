#include "mechlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mechlab/benchmark.hpp"
#include "mechlab/errors.hpp"
#include "mechlab/generators.hpp"
#include "mechlab/suite.hpp"
#include "mechlab/tree.hpp"

namespace mechlab {

namespace {

using nlohmann::json;

json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json nums(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

std::string fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array()) && j.size() <= 64) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
    } else {
        rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

std::string human_table(const json& j) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r.first.size());
    std::ostringstream os;
    for (const auto& [k, v] : rows) os << std::left << std::setw(static_cast<int>(w) + 2) << k << v << "\n";
    return os.str();
}

struct Common {
    bool human = false;
    std::string out;
};

struct Emitter {
    std::ostream& out;
    const Common& common;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    // `human_view` replaces the report in the table output when given.
    void operator()(json report, const std::string& human_extra = "", const json* human_view = nullptr) const {
        report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string text =
            common.human ? human_table(human_view ? *human_view : report) + human_extra : report.dump(2) + "\n";
        if (common.out.empty()) {
            out << text;
        } else {
            std::ofstream f(common.out, std::ios::binary);
            if (!f) throw UsageError("cannot write '" + common.out + "'");
            f << text;
        }
    }
};

json instance_block(const std::string& path, const MrfInstance& inst) {
    return {{"path", path}, {"hash", fnv1a(dump_instance(inst))}, {"items", inst.n()},
            {"valuation", kind_name(inst.valuation.kind)}};
}

json prices_json(const PostedPrices& p) {
    json j = {{"prices", nums(p.prices)}, {"revenue", p.revenue}, {"heuristic", p.heuristic}, {"semantics", p.semantics}};
    if (!p.priority.empty()) j["tie_priority"] = p.priority;
    return j;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

int exit_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Validation: return kExitValidation;
        case ErrorKind::Numerical: return kExitNumerical;
    }
    return kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mechlab: revenue benchmarks for items drawn from a Markov random field", "mechlab"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--human", common.human, "Aligned plain-text table instead of JSON");
        sub->add_option("--out", common.out, "Write the report to a file");
    };

    std::string file;
    auto* params = app.add_subcommand("params", "Dependence parameters: beta, Delta, alpha, rho_d, gamma");
    params->add_option("instance", file, "Instance file")->required();
    add_common(params);

    std::string which = "opt,srev,brev,ronen";
    auto* revenue = app.add_subcommand("revenue", "Optimal, separate, bundle and lookahead revenue");
    revenue->add_option("instance", file, "Instance file")->required();
    revenue->add_option("--which", which, "Comma list from opt,srev,brev,ronen");
    add_common(revenue);

    std::string mech_file;
    auto* bench = app.add_subcommand("benchmark", "Single / Non-Favorite / Tail / Core decomposition");
    bench->add_option("instance", file, "Instance file")->required();
    bench->add_option("--mechanism", mech_file, "Mechanism file (default: the LP optimum)");
    add_common(bench);

    auto* verify = app.add_subcommand("verify", "Evaluate every inequality on one instance");
    verify->add_option("instance", file, "Instance file")->required();
    add_common(verify);

    std::size_t horizon = 20;
    long long start = -1;
    auto* glauber = app.add_subcommand("glauber", "Spectral gap and TV curve of the Glauber chain");
    glauber->add_option("instance", file, "Instance file")->required();
    glauber->add_option("--horizon", horizon, "Number of steps in the TV curve");
    glauber->add_option("--start", start, "Start state (support index; default first positive state)");
    add_common(glauber);

    double eps = 1e-6;
    int root = 0;
    auto* tree = app.add_subcommand("tree-kstar", "Minimal weighted row sum k* on a tree-structured instance");
    tree->add_option("instance", file, "Instance file")->required();
    tree->add_option("--eps", eps, "Bisection tolerance")->check(CLI::PositiveNumber);
    tree->add_option("--root", root, "Root item");
    add_common(tree);

    auto* gen = app.add_subcommand("gen", "Emit a constructed instance");
    gen->require_subcommand(1);
    std::string base_file;
    double alpha_prime = 0.5, beta = 0.5, eps_scale = 0, c_target = 0, beta_prime = 1;
    int gn = 1, gk = 8, gm = 4;
    auto* gmix = gen->add_subcommand("mix", "Mix a two-item base with the product of its marginals");
    gmix->add_option("--base", base_file, "Two-item base instance")->required();
    gmix->add_option("--alpha-prime", alpha_prime, "Weight on the base distribution");
    add_common(gmix);
    auto* gcopies = gen->add_subcommand("copies", "Lookahead-gap instance with n auxiliary items");
    gcopies->add_option("--n", gn, "Auxiliary items");
    gcopies->add_option("--beta", beta, "Pairwise strength");
    gcopies->add_option("--k", gk, "Auxiliary alphabet size");
    gcopies->add_option("--eps-scale", eps_scale, "Auxiliary value step (default 1e-3/(2nk))");
    add_common(gcopies);
    auto* gshells = gen->add_subcommand("shells", "Two-item shell-point instance");
    gshells->add_option("--m", gm, "Number of points");
    gshells->add_option("--c-target", c_target, "Ratio bound to compare against");
    add_common(gshells);
    auto* g3 = gen->add_subcommand("3wise", "Split pairwise potentials into 3-way potentials");
    g3->add_option("--base", base_file, "Pairwise base instance")->required();
    g3->add_option("--beta-prime", beta_prime, "Largest allowed potential magnitude");
    add_common(g3);

    SuiteOptions sopts;
    auto* suite = app.add_subcommand("suite", "Randomized property run over seeded instances");
    suite->add_option("--seed", sopts.seed, "Master seed");
    suite->add_option("--count", sopts.count, "Number of instances");
    suite->add_option("--n-max", sopts.n_max, "Largest item count");
    suite->add_option("--alphabet-max", sopts.alphabet_max, "Largest alphabet");
    suite->add_option("--psi-max", sopts.psi_max, "Potential magnitude bound");
    suite->add_option("--workers", sopts.workers, "Worker threads (0 = all cores)");
    add_common(suite);

    std::vector<std::string> argv_store{"mechlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    Emitter emit{out, common};
    try {
        if (params->parsed()) {
            auto inst = load_instance(file);
            auto dist = joint_distribution(inst);
            auto dep = dependence_report(inst, dist);
            if (dist.size() <= 2000) {
                auto chain = glauber_chain(dist);
                auto d = d_dobrushin(dep.alpha_matrix, std::vector<double>(inst.n(), 1.0));
                dep.has_spectral = true;
                dep.gamma = chain.gap;
                dep.rho_d = d.spectral_radius;
            }
            emit({{"command", "params"}, {"instance", instance_block(file, inst)}, {"result", dep.to_json()}});
            return kExitOk;
        }
        if (revenue->parsed()) {
            auto inst = load_instance(file);
            auto dist = joint_distribution(inst);
            json res;
            for (const auto& w : split(which)) {
                if (w == "opt") {
                    auto o = opt_revenue_lp(inst, dist);
                    res["opt"] = {{"revenue", o.revenue}, {"pivots", o.pivots}, {"worst_ic_ir", o.worst_ic_ir}};
                } else if (w == "srev") {
                    res["srev"] = prices_json(srev(inst, dist));
                    if (inst.valuation.kind == ValuationKind::Additive)
                        res["srev"]["one_item"] = prices_json(srev_one_item(inst, dist));
                } else if (w == "brev") {
                    auto b = brev(inst, dist);
                    res["brev"] = {{"price", num(b.price)}, {"revenue", b.revenue}};
                } else if (w == "ronen") {
                    res["ronen"] = {{"revenue", ronen_copies(inst, dist).revenue}};
                } else {
                    throw UsageError("--which: unknown revenue '" + w + "'");
                }
            }
            emit({{"command", "revenue"},
                  {"instance", instance_block(file, inst)},
                  {"params", {{"which", which}}},
                  {"result", res}});
            return kExitOk;
        }
        if (bench->parsed()) {
            auto inst = load_instance(file);
            auto dist = joint_distribution(inst);
            Mechanism mech;
            double opt = NAN;
            if (mech_file.empty()) {
                auto o = opt_revenue_lp(inst, dist);
                mech = o.mech;
                opt = o.revenue;
            } else {
                std::ifstream f(mech_file);
                if (!f) throw UsageError("cannot open mechanism file '" + mech_file + "'");
                json j;
                try {
                    f >> j;
                } catch (const json::exception& e) {
                    throw ParseError(std::string("mechanism: ") + e.what());
                }
                mech = Mechanism::from_json(j, inst.n(), dist.size());
            }
            auto r = srev(inst, dist).revenue;
            auto r1 = inst.valuation.kind == ValuationKind::Additive ? srev_one_item(inst, dist).revenue : r;
            json res;
            VerificationReport checks;
            Valuation val(inst);
            const double rev = mechanism_revenue(dist, mech);
            checks.add_le("mechanism_ic_ir", 0.0, ic_ir_slack(val, dist, mech), "smallest IC/IR slack");
            if (inst.valuation.kind != ValuationKind::Xos) {
                auto b = decompose(inst, dist, mech, r, BenchmarkFamily::ConstrainedAdditive);
                res["constrained_additive"] = b.to_json();
                checks.add_le("benchmark_constrained_additive", rev, b.bound());
            }
            auto bx = decompose(inst, dist, mech, r1, BenchmarkFamily::Xos);
            res["xos"] = bx.to_json();
            checks.add_le("benchmark_xos", rev, bx.bound());
            res["mechanism"] = mech_file.empty() ? json("lp_optimum") : json(mech_file);
            res["revenue"] = rev;
            if (!std::isnan(opt)) res["opt"] = opt;
            res["checks"] = checks.to_json();
            res["failures"] = checks.failures();
            emit({{"command", "benchmark"}, {"instance", instance_block(file, inst)}, {"result", res}});
            if (!checks.all_pass()) {
                for (const auto& c : checks.checks)
                    if (!c.pass) err << "FAIL " << c.name << ": " << c.lhs << " > " << c.rhs << " " << c.note << "\n";
                return kExitInequality;
            }
            return kExitOk;
        }
        if (verify->parsed()) {
            auto inst = load_instance(file);
            auto dist = joint_distribution(inst);
            auto a = analyze(inst, dist);
            json res = {{"summary", a.summary()}, {"checks", a.report.to_json()}, {"failures", a.report.failures()}};
            json head = {{"command", "verify"}, {"instance", instance_block(file, inst)}};
            json report = head;
            report["result"] = res;
            head["summary"] = a.summary();
            emit(report, "\n" + a.report.table(), &head);
            if (!a.report.all_pass()) {
                for (const auto& c : a.report.checks)
                    if (!c.pass) err << "FAIL " << c.name << ": " << c.lhs << " > " << c.rhs << " " << c.note << "\n";
                return kExitInequality;
            }
            return kExitOk;
        }
        if (glauber->parsed()) {
            auto inst = load_instance(file);
            auto dist = joint_distribution(inst);
            auto chain = glauber_chain(dist);
            std::size_t s = start >= 0 ? static_cast<std::size_t>(start) : chain.states.front();
            auto tv = tv_curve(chain, s, horizon);
            json res = {{"gamma", chain.gap},
                        {"n_gamma", inst.n() * chain.gap},
                        {"lambda2", chain.lambda2},
                        {"positive_states", chain.states.size()},
                        {"detailed_balance_residual", detailed_balance_residual(chain)},
                        {"start", s},
                        {"tv", tv}};
            emit({{"command", "glauber"},
                  {"instance", instance_block(file, inst)},
                  {"params", {{"horizon", horizon}}},
                  {"result", res}});
            return kExitOk;
        }
        if (tree->parsed()) {
            auto inst = load_instance(file);
            auto dist = joint_distribution(inst);
            auto t = tree_from_instance(inst, dist, root);
            auto k = kstar_search(t, eps);
            auto suff = sufficient_k(t, k.weight);
            json res = kstar_report(t, k);
            res["witness_scales"] = scales_from_weights(t, k.weight);
            res["sufficient_k"] = {{"k", suff.k}, {"rho", suff.rho}, {"rho_le_k", suff.rho_le_k}};
            res["steps"] = k.steps;
            emit({{"command", "tree-kstar"},
                  {"instance", instance_block(file, inst)},
                  {"params", {{"eps", eps}, {"root", root}}},
                  {"result", res}});
            return kExitOk;
        }
        if (gen->parsed()) {
            MrfInstance inst;
            if (gmix->parsed()) inst = gen_mix(load_instance(base_file), alpha_prime);
            else if (gcopies->parsed()) inst = gen_copies(gn, beta, gk, eps_scale);
            else if (gshells->parsed()) inst = gen_shells(gm, c_target);
            else inst = reduce_3wise(load_instance(base_file), beta_prime);
            if (common.out.empty()) out << dump_instance(inst);
            else save_instance(inst, common.out);
            return kExitOk;
        }
        if (suite->parsed()) {
            if (sopts.count < 0 || sopts.n_max < 1 || sopts.alphabet_max < 1 || !(sopts.psi_max >= 0))
                throw UsageError("suite: count >= 0, n-max >= 1, alphabet-max >= 1, psi-max >= 0 required");
            auto entries = run_suite(sopts);
            auto report = suite_to_json(sopts, entries);
            std::ostringstream os;
            os << "\n";
            for (const auto& e : entries) {
                os << std::setw(5) << e.id << "  ";
                if (!e.error.empty()) {
                    os << "error " << e.error << "\n";
                    continue;
                }
                os << std::left << std::setw(22) << kind_name(e.inst.valuation.kind) << std::right << " n=" << e.inst.n()
                   << "  checks=" << e.analysis.report.checks.size() << "  failures=" << e.analysis.report.failures()
                   << "\n";
            }
            json head = {{"command", "suite"}, {"params", report["params"]}, {"failures", report["failures"]}};
            emit(report, os.str(), &head);
            int f = suite_failures(entries);
            if (f > 0) {
                for (const auto& e : entries) {
                    if (!e.error.empty()) err << "FAIL instance " << e.id << ": " << e.error << "\n";
                    for (const auto& c : e.analysis.report.checks)
                        if (!c.pass) err << "FAIL instance " << e.id << " " << c.name << ": " << c.lhs << " > " << c.rhs << "\n";
                }
                return kExitInequality;
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace mechlab
