#include <cmath>
#include <random>

#include <doctest.h>

#include <Eigen/Dense>

#include "mechlab/errors.hpp"
#include "mechlab/simplex.hpp"

using namespace mechlab;

namespace {

// Best vertex of {A x <= b, x >= 0} by enumerating every choice of n tight constraints.
double vertex_oracle(const Matrix& A, const std::vector<double>& b, const std::vector<double>& c) {
    const int m = static_cast<int>(A.rows), n = static_cast<int>(A.cols);
    const int rows = m + n;
    auto row = [&](int r, int j) { return r < m ? A(r, j) : (r - m == j ? -1.0 : 0.0); };
    auto rhs = [&](int r) { return r < m ? b[r] : 0.0; };
    double best = -INFINITY;
    std::vector<int> pick(n);
    for (int k = 0; k < n; ++k) pick[k] = k;
    while (true) {
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd y(n);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) M(k, j) = row(pick[k], j);
            y(k) = rhs(pick[k]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (lu.isInvertible()) {
            Eigen::VectorXd x = lu.solve(y);
            bool ok = true;
            for (int r = 0; r < rows && ok; ++r) {
                double s = 0;
                for (int j = 0; j < n; ++j) s += row(r, j) * x(j);
                ok = s <= rhs(r) + 1e-9;
            }
            if (ok) {
                double v = 0;
                for (int j = 0; j < n; ++j) v += c[j] * x(j);
                best = std::max(best, v);
            }
        }
        int k = n - 1;
        while (k >= 0 && pick[k] == rows - n + k) --k;
        if (k < 0) break;
        ++pick[k];
        for (int q = k + 1; q < n; ++q) pick[q] = pick[q - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("simplex: textbook problem") {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
    auto A = Matrix::from_rows({{1, 0}, {0, 2}, {3, 2}});
    for (auto rule : {PivotRule::Bland, PivotRule::DantzigBland}) {
        auto r = simplex_max(A, {4, 12, 18}, {3, 5}, 1e-9, -1, rule);
        CHECK(std::abs(r.objective - 36) < 1e-12);
        CHECK(std::abs(r.x[0] - 2) < 1e-12);
        CHECK(std::abs(r.x[1] - 6) < 1e-12);
        CHECK(r.max_violation <= 1e-12);
    }
}

TEST_CASE("simplex: degenerate cycling example terminates") {
    // Beale's example: cycles under the plain largest-coefficient rule.
    auto A = Matrix::from_rows({{0.25, -60, -1.0 / 25, 9}, {0.5, -90, -1.0 / 50, 3}, {0, 0, 1, 0}});
    for (auto rule : {PivotRule::Bland, PivotRule::DantzigBland}) {
        auto r = simplex_max(A, {0, 0, 1}, {0.75, -150, 1.0 / 50, -6}, 1e-9, 1000, rule);
        CHECK(std::abs(r.objective - 0.05) < 1e-12);
    }
}

TEST_CASE("simplex: unbounded and pivot guard") {
    auto A = Matrix::from_rows({{1, -1}});
    CHECK_THROWS_AS(simplex_max(A, {1}, {1, 1}), LpNumericalFailure);
    auto B = Matrix::from_rows({{1, 0}, {0, 2}, {3, 2}});
    CHECK_THROWS_AS(simplex_max(B, {4, 12, 18}, {3, 5}, 1e-9, 0), LpNumericalFailure);
}

TEST_CASE("simplex: random bounded LPs against vertex enumeration") {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 4, m = 2 + trial % 5;
        Matrix A(m, n);
        std::vector<double> b(m), c(n);
        for (int r = 0; r < m; ++r) {
            for (int j = 0; j < n; ++j) A(r, j) = u(rng) < 0.2 ? -u(rng) : u(rng);
            // Degenerate right-hand sides on purpose.
            b[r] = u(rng) < 0.3 ? 0 : std::round(u(rng) * 10);
        }
        // A box row keeps the region bounded.
        Matrix Ab(m + 1, n);
        for (int r = 0; r < m; ++r)
            for (int j = 0; j < n; ++j) Ab(r, j) = A(r, j);
        for (int j = 0; j < n; ++j) Ab(m, j) = 1;
        b.push_back(10);
        for (double& x : c) x = u(rng) * 2 - 0.5;
        auto want = vertex_oracle(Ab, b, c);
        for (auto rule : {PivotRule::Bland, PivotRule::DantzigBland}) {
            auto r = simplex_max(Ab, b, c, 1e-9, -1, rule);
            CHECK(std::abs(r.objective - want) < 1e-9);
            CHECK(r.max_violation < 1e-9);
            for (double x : r.x) CHECK(x >= -1e-12);
        }
    }
}
