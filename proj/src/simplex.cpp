#include "mechlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mechlab/errors.hpp"

namespace mechlab {

namespace {
using Real = double;       // tableau
using Acc = long double;   // refactorization

// Solves M x = v in place by Gaussian elimination with partial pivoting; M is destroyed.
bool lu_solve(std::vector<Acc>& M, std::size_t k, std::vector<Acc>& v) {
    for (std::size_t q = 0; q < k; ++q) {
        std::size_t piv = q;
        for (std::size_t a = q + 1; a < k; ++a)
            if (std::abs(M[a * k + q]) > std::abs(M[piv * k + q])) piv = a;
        if (std::abs(M[piv * k + q]) < 1e-30) return false;
        if (piv != q) {
            for (std::size_t x = 0; x < k; ++x) std::swap(M[q * k + x], M[piv * k + x]);
            std::swap(v[q], v[piv]);
        }
        for (std::size_t a = q + 1; a < k; ++a) {
            Acc f = M[a * k + q] / M[q * k + q];
            if (f == 0) continue;
            for (std::size_t x = q + 1; x < k; ++x) M[a * k + x] -= f * M[q * k + x];
            v[a] -= f * v[q];
        }
    }
    for (std::size_t a = k; a-- > 0;) {
        for (std::size_t x = a + 1; x < k; ++x) v[a] -= M[a * k + x] * v[x];
        v[a] /= M[a * k + a];
    }
    return true;
}

}

LpResult simplex_max(const Matrix& A, const std::vector<double>& b, const std::vector<double>& c,
                     double pivot_tol, long max_pivots, PivotRule rule) {
    const std::size_t m = A.rows, nv = A.cols;
    for (double x : b)
        if (x < 0) throw LpNumericalFailure("right-hand side must be nonnegative");
    if (max_pivots < 0) max_pivots = 50L * static_cast<long>(m + nv) + 10000;

    // Row r: x_basic[r] + sum_j T[r][j] x_nonbasic[j] = rhs[r].
    // Objective: z + sum_j obj[j] x_nonbasic[j] = z0, so obj[j] < 0 means improving.
    std::vector<Real> T(A.a.begin(), A.a.end());
    // Degenerate rows are perturbed by distinct small amounts while the largest-coefficient
    // rule runs; the true right-hand side is restored before the final optimality check.
    bool perturbed = rule == PivotRule::DantzigBland;
    std::vector<double> beff = b;
    if (perturbed)
        for (std::size_t r = 0; r < m; ++r) beff[r] += 1e-7 * (1.0 + static_cast<double>((r * 2654435761ULL) % 1009) / 1009.0);
    std::vector<Real> rhs(beff.begin(), beff.end());
    std::vector<Real> obj(nv);
    for (std::size_t j = 0; j < nv; ++j) obj[j] = -c[j];
    std::vector<std::size_t> basic(m), nonbasic(nv);
    for (std::size_t j = 0; j < nv; ++j) nonbasic[j] = j;
    for (std::size_t r = 0; r < m; ++r) basic[r] = nv + r;
    auto at = [&](std::size_t r, std::size_t j) -> Real& { return T[r * nv + j]; };

    // Rebuild the dictionary from A for the current basis. Basic structurals K and
    // tight rows R1 (nonbasic slacks) form the square system A[R1, K].
    // full = false refreshes only the right-hand side and the reduced costs.
    auto refactor = [&](bool full) -> bool {
        std::vector<std::size_t> K, R1, pos_of_basic_row(nv, m);
        for (std::size_t r = 0; r < m; ++r)
            if (basic[r] < nv) {
                K.push_back(basic[r]);
                pos_of_basic_row[basic[r]] = r;
            }
        for (std::size_t j = 0; j < nv; ++j)
            if (nonbasic[j] >= nv) R1.push_back(nonbasic[j] - nv);
        const std::size_t k = K.size();
        if (R1.size() != k) return false;
        // LU with partial pivoting of M = A[R1, K], stored row-major.
        std::vector<Acc> M(k * k);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t q = 0; q < k; ++q) M[a * k + q] = A(R1[a], K[q]);
        std::vector<std::size_t> perm(k);
        for (std::size_t a = 0; a < k; ++a) perm[a] = a;
        for (std::size_t q = 0; q < k; ++q) {
            std::size_t piv = q;
            for (std::size_t a = q + 1; a < k; ++a)
                if (std::abs(M[a * k + q]) > std::abs(M[piv * k + q])) piv = a;
            if (std::abs(M[piv * k + q]) < 1e-30) return false;
            if (piv != q) {
                for (std::size_t x = 0; x < k; ++x) std::swap(M[q * k + x], M[piv * k + x]);
                std::swap(perm[q], perm[piv]);
            }
            for (std::size_t a = q + 1; a < k; ++a) {
                Acc f = M[a * k + q] /= M[q * k + q];
                if (f != 0)
                    for (std::size_t x = q + 1; x < k; ++x) M[a * k + x] -= f * M[q * k + x];
            }
        }
        // y = M^{-1} v for v indexed by R1 order.
        auto solve = [&](std::vector<Acc>& v) {
            std::vector<Acc> w(k);
            for (std::size_t a = 0; a < k; ++a) w[a] = v[perm[a]];
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t x = 0; x < a; ++x) w[a] -= M[a * k + x] * w[x];
            for (std::size_t a = k; a-- > 0;) {
                for (std::size_t x = a + 1; x < k; ++x) w[a] -= M[a * k + x] * w[x];
                w[a] /= M[a * k + a];
            }
            v = std::move(w);
        };
        // Column of variable id in the original system [A | I].
        auto column_in_r1 = [&](std::size_t id, std::vector<Acc>& v) {
            v.assign(k, 0);
            for (std::size_t a = 0; a < k; ++a)
                v[a] = id < nv ? static_cast<Acc>(A(R1[a], id)) : (id - nv == R1[a] ? 1 : 0);
        };
        // Representation y of column a_id (or b when id == npos) in the basis; fills a dictionary column.
        std::vector<Acc> v;
        auto represent = [&](std::size_t id, std::vector<Acc>& out_rows, Acc& out_obj) {
            if (id == std::numeric_limits<std::size_t>::max()) {
                v.assign(k, 0);
                for (std::size_t a = 0; a < k; ++a) v[a] = beff[R1[a]];
            } else {
                column_in_r1(id, v);
            }
            solve(v);  // v[q] is the coefficient of structural K[q]
            out_obj = 0;
            for (std::size_t q = 0; q < k; ++q) {
                out_rows[pos_of_basic_row[K[q]]] = v[q];
                out_obj += c[K[q]] * v[q];
            }
            for (std::size_t r = 0; r < m; ++r) {
                if (basic[r] < nv) continue;
                const std::size_t row = basic[r] - nv;
                Acc x = id == std::numeric_limits<std::size_t>::max() ? static_cast<Acc>(beff[row])
                         : id < nv                                   ? static_cast<Acc>(A(row, id))
                                                                     : (id - nv == row ? 1 : 0);
                for (std::size_t q = 0; q < k; ++q) x -= A(row, K[q]) * v[q];
                out_rows[r] = x;
            }
        };
        std::vector<Acc> rows_buf(m);
        Acc o;
        represent(std::numeric_limits<std::size_t>::max(), rows_buf, o);
        rhs.assign(rows_buf.begin(), rows_buf.end());
        for (auto& x : rhs)
            if (x < 0 && x > -1e-9) x = 0;
        if (full) {
            for (std::size_t j = 0; j < nv; ++j) {
                represent(nonbasic[j], rows_buf, o);
                for (std::size_t r = 0; r < m; ++r) at(r, j) = static_cast<Real>(rows_buf[r]);
                obj[j] = static_cast<Real>(o - (nonbasic[j] < nv ? c[nonbasic[j]] : 0));
            }
        } else {
            // Duals y = M^{-T} c_K, then obj_j = y . a_j[R1] - c_j.
            std::vector<Acc> Mt(k * k);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t q = 0; q < k; ++q) Mt[q * k + a] = A(R1[a], K[q]);
            std::vector<Acc> y(k);
            for (std::size_t q = 0; q < k; ++q) y[q] = c[K[q]];
            if (!lu_solve(Mt, k, y)) return false;
            for (std::size_t j = 0; j < nv; ++j) {
                const std::size_t id = nonbasic[j];
                Acc d = 0;
                if (id < nv) {
                    for (std::size_t a = 0; a < k; ++a) d += y[a] * A(R1[a], id);
                    d -= c[id];
                } else {
                    for (std::size_t a = 0; a < k; ++a)
                        if (R1[a] == id - nv) d = y[a];
                }
                obj[j] = static_cast<Real>(d);
            }
        }
        return true;
    };

    LpResult res;
    std::vector<Real> col(m), norm(nv);
    int degenerate_run = 0;
    auto pivot_on = [&](std::size_t leave, std::size_t enter) {
        const Real p = at(leave, enter);
        Real* prow = &T[leave * nv];
        for (std::size_t j = 0; j < nv; ++j) prow[j] /= p;
        prow[enter] = 1 / p;
        rhs[leave] /= p;
        for (std::size_t r = 0; r < m; ++r) col[r] = at(r, enter);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == leave) continue;
            Real f = col[r];
            if (f == 0) continue;
            Real* row = &T[r * nv];
            for (std::size_t j = 0; j < nv; ++j) row[j] -= f * prow[j];
            row[enter] = -f / p;
            rhs[r] -= f * rhs[leave];
            if (rhs[r] < 0 && rhs[r] > -1e-9) rhs[r] = 0;
        }
        Real f = obj[enter];
        for (std::size_t j = 0; j < nv; ++j) obj[j] -= f * prow[j];
        obj[enter] = -f / p;
        std::swap(basic[leave], nonbasic[enter]);
    };

    // Dual simplex steps: removes the small infeasibilities left when the rhs perturbation is dropped.
    auto dual_restore = [&]() {
        for (int step = 0; step < 10 * static_cast<int>(m) + 100; ++step) {
            std::size_t leave = m;
            for (std::size_t r = 0; r < m; ++r)
                if (rhs[r] < -1e-9 && (leave == m || rhs[r] < rhs[leave])) leave = r;
            if (leave == m) return true;
            std::size_t enter = nv;
            Real best = INFINITY;
            for (std::size_t j = 0; j < nv; ++j) {
                Real a = at(leave, j);
                if (a >= -pivot_tol) continue;
                Real ratio = std::max<Real>(obj[j], 0) / -a;
                if (ratio < best || (ratio == best && a < at(leave, enter))) {
                    best = ratio;
                    enter = j;
                }
            }
            if (enter == nv) return false;
            ++res.pivots;
            pivot_on(leave, enter);
        }
        return false;
    };

    bool refactored_at_end = false;
    while (true) {
        if (res.pivots > 0 && res.pivots % 200 == 0) refactor(true);
        const bool bland = rule == PivotRule::Bland || degenerate_run >= 50;
        std::size_t enter = nv;
        if (bland) {
            std::size_t best_id = std::numeric_limits<std::size_t>::max();
            for (std::size_t j = 0; j < nv; ++j)
                if (obj[j] < -pivot_tol && nonbasic[j] < best_id) {
                    best_id = nonbasic[j];
                    enter = j;
                }
        } else {
            // Steepest edge: largest obj_j^2 / (1 + |column j|^2) among improving columns.
            std::fill(norm.begin(), norm.end(), Real(1));
            for (std::size_t r = 0; r < m; ++r) {
                const Real* row = &T[r * nv];
                for (std::size_t j = 0; j < nv; ++j) norm[j] += row[j] * row[j];
            }
            Real best = 0;
            for (std::size_t j = 0; j < nv; ++j)
                if (obj[j] < -pivot_tol && obj[j] * obj[j] / norm[j] > best) {
                    best = obj[j] * obj[j] / norm[j];
                    enter = j;
                }
        }
        if (enter == nv) {
            if (perturbed) {
                perturbed = false;
                beff = b;
                if (!refactor(true) || !dual_restore())
                    return simplex_max(A, b, c, pivot_tol, max_pivots, PivotRule::Bland);
                refactored_at_end = true;
                continue;
            }
            // Confirm optimality on a freshly rebuilt dictionary.
            if (refactored_at_end || !refactor(true)) break;
            refactored_at_end = true;
            continue;
        }
        refactored_at_end = false;

        Real best_ratio = INFINITY;
        for (std::size_t r = 0; r < m; ++r) {
            Real a = at(r, enter);
            if (a > pivot_tol) best_ratio = std::min(best_ratio, std::max<Real>(rhs[r], 0) / a);
        }
        // Among rows attaining the minimum ratio: smallest basic id (Bland) or largest pivot.
        std::size_t leave = m;
        for (std::size_t r = 0; r < m; ++r) {
            Real a = at(r, enter);
            if (a <= pivot_tol || std::max<Real>(rhs[r], 0) / a > best_ratio + 1e-12) continue;
            if (leave == m || (bland ? basic[r] < basic[leave] : a > at(leave, enter))) leave = r;
        }
        if (leave == m) throw LpNumericalFailure("objective unbounded");
        if (++res.pivots > max_pivots) throw LpNumericalFailure("pivot limit reached (cycling guard)");
        if (best_ratio * -obj[enter] > 1e-13) {
            degenerate_run = 0;
        } else {
            ++degenerate_run;
            ++res.degenerate_pivots;
        }

        pivot_on(leave, enter);
    }

    res.x.assign(nv, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (basic[r] < nv) res.x[basic[r]] = static_cast<double>(rhs[r]);
    for (std::size_t r = 0; r < m; ++r) {
        double lhs = 0;
        for (std::size_t j = 0; j < nv; ++j) lhs += A(r, j) * res.x[j];
        res.max_violation = std::max(res.max_violation, lhs - b[r]);
    }
    res.objective = 0;
    for (std::size_t j = 0; j < nv; ++j) res.objective += c[j] * res.x[j];
    return res;
}

}  // namespace mechlab
