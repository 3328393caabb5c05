#include <cmath>
#include <random>

#include <doctest.h>

#include "mechlab/errors.hpp"
#include "mechlab/mrf.hpp"
#include "support.hpp"

using namespace mechlab;
using testkit::ising;
using testkit::scalar_instance;

namespace {

const char* kProduct = R"({
  "items": [ {"name": "a", "alphabet": [1, 2], "node_potential": [0, 0]},
             {"name": "b", "alphabet": [1, 3], "node_potential": [0, 0]} ],
  "edges": [],
  "valuation": {"kind": "additive"} })";

std::string with_edge_table(const std::string& table) {
    return R"({ "items": [ {"name": "a", "alphabet": [1, 2], "node_potential": [0, 0]},
                           {"name": "b", "alphabet": [1, 3], "node_potential": [0, 0]} ],
                "edges": [ {"members": [0, 1], "table": )" +
           table + R"(} ], "valuation": {"kind": "additive"} })";
}

}  // namespace

TEST_CASE("parse: product instance") {
    auto inst = parse_instance(kProduct);
    CHECK(inst.n() == 2);
    CHECK(inst.edges.empty());
    CHECK(inst.items[1].alphabet[1][0] == 3);
}

TEST_CASE("parse: table length must match the member alphabets") {
    CHECK_THROWS_AS(parse_instance(with_edge_table("[0, 0, 0]")), ValidationError);
    CHECK_NOTHROW(parse_instance(with_edge_table("[0, 0, 0, 0]")));
}

TEST_CASE("parse: feasible sets must be downward closed") {
    const char* doc = R"({ "items": [ {"name": "a", "alphabet": [1], "node_potential": [0]},
                                      {"name": "b", "alphabet": [1], "node_potential": [0]} ],
                           "edges": [],
                           "valuation": {"kind": "constrained_additive", "feasible_sets": [[], [0], [0, 1]]} })";
    try {
        parse_instance(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("feasible_sets") != std::string::npos);
    }
}

TEST_CASE("parse: errors name the field") {
    CHECK_THROWS_AS(parse_instance("{not json"), ParseError);
    CHECK_THROWS_AS(parse_instance(R"({"edges": []})"), ParseError);
    try {
        parse_instance(with_edge_table("[0, 0, \"x\", 0]"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("edges[0].table") != std::string::npos);
    }
    auto bad = scalar_instance({{1, 1}});
    CHECK_THROWS_AS(validate(bad), ValidationError);
    auto neg = scalar_instance({{-1, 1}});
    CHECK_THROWS_AS(validate(neg), ValidationError);
    auto order = ising(0.3);
    order.edges[0].members = {1, 0};
    CHECK_THROWS_AS(validate(order), ValidationError);
    auto xos = scalar_instance({{1}, {2}}, ValuationKind::Xos);
    xos.valuation.clauses = 2;
    xos.items[0].alphabet = {{1, 0}};
    xos.items[1].alphabet = {{2}};
    CHECK_THROWS_AS(validate(xos), ValidationError);
}

TEST_CASE("parse: dump round trip") {
    std::mt19937_64 rng(11);
    for (auto kind : {ValuationKind::Additive, ValuationKind::ConstrainedAdditive, ValuationKind::Xos}) {
        testkit::RandomSpec spec;
        spec.kind = kind;
        auto inst = testkit::random_instance(rng, spec);
        auto back = parse_instance(dump_instance(inst));
        CHECK(dump_instance(back) == dump_instance(inst));
    }
}

TEST_CASE("joint: uniform product") {
    auto dist = joint_distribution(scalar_instance({{0, 1}, {0, 1}}));
    REQUIRE(dist.size() == 4);
    for (double p : dist.pmf) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("joint: agreement potential") {
    const double J = 0.7;
    auto dist = joint_distribution(ising(J));
    const double eq = std::exp(J) / (2 * std::exp(J) + 2 * std::exp(-J));
    CHECK(std::abs(dist.pmf[0] - eq) < 1e-15);
    CHECK(std::abs(dist.pmf[3] - eq) < 1e-15);
    CHECK(std::abs(dist.pmf[1] - (0.5 - eq)) < 1e-15);
}

TEST_CASE("joint: single item with log-probability potentials") {
    auto inst = scalar_instance({{1, 2, 3}});
    const std::vector<double> p{0.2, 0.5, 0.3};
    for (int a = 0; a < 3; ++a) inst.items[0].node_potential[a] = std::log(p[a]);
    auto dist = joint_distribution(inst);
    CHECK(std::abs(dist.log_partition) < 1e-15);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(dist.pmf[a] - p[a]) < 1e-15);
}

TEST_CASE("joint: support cap") {
    auto inst = scalar_instance({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
    CHECK_THROWS_AS(joint_distribution(inst, 20), SupportTooLarge);
    CHECK(joint_distribution(inst, 27).size() == 27);
}

TEST_CASE("joint: lexicographic order and oracle agreement on random instances") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        testkit::RandomSpec spec;
        spec.kind = static_cast<ValuationKind>(trial % 4);
        auto inst = testkit::random_instance(rng, spec);
        auto dist = joint_distribution(inst);
        auto want = testkit::brute_pmf(inst);
        auto types = testkit::all_types(inst);
        REQUIRE(dist.size() == want.size());
        double total = 0, err = 0;
        for (std::size_t k = 0; k < want.size(); ++k) {
            total += dist.pmf[k];
            err = std::max(err, std::abs(dist.pmf[k] - want[k]));
            CHECK(dist.type(k) == types[k]);
            CHECK(dist.encode(types[k]) == k);
        }
        CHECK(std::abs(total - 1) < 1e-12);
        CHECK(err < 1e-12);
    }
}

TEST_CASE("conditional: product instance equals marginal") {
    auto inst = parse_instance(kProduct);
    inst.items[0].node_potential = {0.3, -0.2};
    auto dist = joint_distribution(inst);
    auto m = marginal(dist, 0);
    for (int b = 0; b < 2; ++b) {
        auto c = conditional(dist, 0, {0, b});
        for (int a = 0; a < 2; ++a) CHECK(std::abs(c[a] - m[a]) < 1e-15);
    }
}

TEST_CASE("conditional: agreement potential") {
    const double J = 0.4;
    auto dist = joint_distribution(ising(J));
    for (int a = 0; a < 2; ++a) {
        auto c = conditional(dist, 0, {0, a});
        CHECK(std::abs(c[a] - std::exp(J) / (std::exp(J) + std::exp(-J))) < 1e-15);
    }
}

TEST_CASE("conditional: zero-probability context") {
    auto inst = scalar_instance({{0, 1}, {0, 1}});
    inst.items[1].node_potential = {0, -1000};
    auto dist = joint_distribution(inst);
    CHECK(dist.pmf[1] == 0);
    CHECK_THROWS_AS(conditional(dist, 0, {0, 1}), ZeroProbabilityContext);
    CHECK_NOTHROW(conditional(dist, 0, {0, 0}));
}

TEST_CASE("conditional: normalized on every positive context") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto inst = testkit::random_instance(rng, {});
        auto dist = joint_distribution(inst);
        for (int i = 0; i < inst.n(); ++i)
            for (std::size_t k = 0; k < dist.size(); ++k) {
                auto c = conditional(dist, i, dist.type(k));
                double s = 0;
                for (double x : c) s += x;
                CHECK(std::abs(s - 1) < 1e-12);
            }
    }
}

TEST_CASE("dependence: product instance") {
    auto inst = parse_instance(kProduct);
    auto rep = dependence_report(inst, joint_distribution(inst));
    CHECK(rep.delta == 0);
    CHECK(rep.beta == 0);
    CHECK(rep.alpha == 0);
}

TEST_CASE("dependence: agreement potential") {
    const double J = 0.55;
    auto inst = ising(J);
    auto rep = dependence_report(inst, joint_distribution(inst));
    CHECK(std::abs(rep.beta_matrix[0][1] - J) < 1e-15);
    CHECK(std::abs(rep.delta - J) < 1e-15);
    CHECK(std::abs(rep.alpha_matrix[0][1] - std::tanh(J)) < 1e-14);
    CHECK(std::abs(rep.alpha_matrix[1][0] - std::tanh(J)) < 1e-14);
    CHECK(std::abs(max_weighted_degree(inst) - J) < 1e-15);
}

TEST_CASE("dependence: random instances against brute-force oracles") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 80; ++trial) {
        testkit::RandomSpec spec;
        spec.kind = static_cast<ValuationKind>(trial % 4);
        auto inst = testkit::random_instance(rng, spec);
        auto dist = joint_distribution(inst);
        auto rep = dependence_report(inst, dist);
        auto alpha = testkit::brute_alpha(inst);
        auto beta = testkit::brute_beta(inst);
        const int n = inst.n();
        double beta_max = 0, alpha_max = 0;
        for (int i = 0; i < n; ++i) {
            double rb = 0, ra = 0;
            CHECK(rep.alpha_matrix[i][i] == 0);
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                CHECK(std::abs(rep.alpha_matrix[i][j] - alpha[i][j]) < 1e-12);
                CHECK(std::abs(rep.beta_matrix[i][j] - beta[i][j]) < 1e-12);
                CHECK(rep.alpha_matrix[i][j] >= 0);
                CHECK(rep.alpha_matrix[i][j] <= std::min(1.0, rep.beta_matrix[i][j]) + 1e-12);
                rb += beta[i][j];
                ra += alpha[i][j];
            }
            beta_max = std::max(beta_max, rb);
            alpha_max = std::max(alpha_max, ra);
        }
        CHECK(std::abs(rep.beta - beta_max) < 1e-12);
        CHECK(std::abs(rep.alpha - alpha_max) < 1e-12);
        double dmax = 0;
        for (double d : rep.weighted_degrees) dmax = std::max(dmax, d);
        CHECK(rep.delta == doctest::Approx(dmax));
    }
}

TEST_CASE("dependence: removing edges gives the product of marginals") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = testkit::random_instance(rng, {});
        inst.edges.clear();
        auto dist = joint_distribution(inst);
        auto rep = dependence_report(inst, dist);
        CHECK(rep.alpha == 0);
        std::vector<std::vector<double>> m;
        for (int i = 0; i < inst.n(); ++i) m.push_back(marginal(dist, i));
        for (std::size_t k = 0; k < dist.size(); ++k) {
            double prod = 1;
            for (int i = 0; i < inst.n(); ++i) prod *= m[i][dist.coord(k, i)];
            CHECK(std::abs(prod - dist.pmf[k]) < 1e-12);
        }
    }
}

TEST_CASE("conditional bound check") {
    SUBCASE("product instance has ratio 1") {
        auto inst = parse_instance(kProduct);
        auto rep = conditional_bound_check(inst, joint_distribution(inst));
        REQUIRE(rep.find("cond_ratio_upper"));
        CHECK(std::abs(rep.find("cond_ratio_upper")->lhs - 1) < 1e-12);
        CHECK(rep.find("cond_ratio_upper")->rhs == 1);
        CHECK(rep.all_pass());
    }
    SUBCASE("agreement potential") {
        const double J = 0.3;
        auto inst = ising(J);
        auto rep = conditional_bound_check(inst, joint_distribution(inst));
        const auto* up = rep.find("cond_ratio_upper");
        REQUIRE(up);
        CHECK(std::abs(up->lhs - 2 * std::exp(J) / (std::exp(J) + std::exp(-J))) < 1e-12);
        CHECK(std::abs(up->rhs - std::exp(4 * J)) < 1e-12);
        CHECK(rep.all_pass());
    }
    SUBCASE("negative control: potentials edited after the joint was computed") {
        auto inst = ising(0.8);
        auto dist = joint_distribution(inst);
        inst.edges.clear();
        auto rep = conditional_bound_check(inst, dist);
        CHECK_FALSE(rep.all_pass());
        const auto* up = rep.find("cond_ratio_upper");
        REQUIRE(up);
        CHECK_FALSE(up->pass);
        CHECK(up->note.find("item") != std::string::npos);
    }
    SUBCASE("ratios stay inside the envelope on random instances") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 40; ++trial) {
            auto inst = testkit::random_instance(rng, {});
            CHECK(conditional_bound_check(inst, joint_distribution(inst)).all_pass());
        }
    }
}
