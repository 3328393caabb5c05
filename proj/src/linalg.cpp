#include "mechlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mechlab {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
    std::vector<std::vector<double>> r(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) r[i][j] = (*this)(i, j);
    return r;
}

double Matrix::max_row_sum() const {
    double best = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < cols; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = &m.a[i * m.cols];
        double s = 0;
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> vec_mat(const std::vector<double>& x, const Matrix& m) {
    std::vector<double> y(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (x[i] == 0) continue;
        const double* row = &m.a[i * m.cols];
        for (std::size_t j = 0; j < m.cols; ++j) y[j] += x[i] * row[j];
    }
    return y;
}

SymmetricEigen jacobi_eigen(Matrix s, double tol, int max_sweeps) {
    const std::size_t n = s.rows;
    SymmetricEigen out;
    out.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, i) = 1;

    double total = 0;
    for (double x : s.a) total += x * x;
    const double thresh = tol * tol * std::max(total, 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2 * s(p, q) * s(p, q);
        if (off <= thresh) break;
        out.sweeps = sweep + 1;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = s(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (s(q, q) - s(p, p)) / (2 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = out.vectors(k, p), vkq = out.vectors(k, q);
                    out.vectors(k, p) = c * vkp - sn * vkq;
                    out.vectors(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return s(x, x) > s(y, y); });
    Matrix v(n, n);
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = s(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) v(i, k) = out.vectors(i, order[k]);
    }
    out.vectors = std::move(v);
    return out;
}

namespace {

// Collatz-Wielandt bracketing for an irreducible block; returns false when not converged.
bool perron_power(const Matrix& b, double shift, double tol, int max_iter, double& rho, int& iters) {
    const std::size_t m = b.rows;
    std::vector<double> x(m, 1.0), y(m);
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = shift * x[i];
            for (std::size_t j = 0; j < m; ++j) s += b(i, j) * x[j];
            y[i] = s;
        }
        double lo = INFINITY, hi = 0, mx = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            mx = std::max(mx, y[i]);
        }
        ++iters;
        if (hi - lo <= tol * std::max(1.0, hi)) {
            rho = 0.5 * (lo + hi) - shift;
            return true;
        }
        if (!(mx > 0)) {
            rho = 0;
            return true;
        }
        for (std::size_t i = 0; i < m; ++i) x[i] = std::max(y[i] / mx, 1e-300);
    }
    return false;
}

std::vector<std::vector<std::size_t>> strong_components(const Matrix& a) {
    const std::size_t n = a.rows;
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) reach[i][j] = (i == j) || a(i, j) > 0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        out.emplace_back();
        for (std::size_t j = i; j < n; ++j)
            if (comp[j] < 0 && reach[i][j] && reach[j][i]) {
                comp[j] = static_cast<int>(out.size() - 1);
                out.back().push_back(j);
            }
    }
    return out;
}

}  // namespace

PerronResult spectral_radius_nonneg(const Matrix& a, double tol, int max_iter) {
    PerronResult res;
    const std::size_t n = a.rows;
    bool zero = std::all_of(a.a.begin(), a.a.end(), [](double x) { return x == 0; });
    if (n == 0 || zero) {
        res.method = "zero";
        res.reducible = n > 1;
        return res;
    }
    auto comps = strong_components(a);
    res.reducible = comps.size() > 1;
    res.method = res.reducible ? "components" : "power";
    for (const auto& c : comps) {
        Matrix b(c.size(), c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) b(i, j) = a(c[i], c[j]);
        double rho = 0;
        if (c.size() == 1) {
            rho = b(0, 0);
        } else {
            int first = std::min(max_iter, 1000);
            if (!perron_power(b, 0.0, tol, first, rho, res.iterations)) {
                if (!perron_power(b, 1.0, tol, max_iter - first, rho, res.iterations))
                    rho = b.max_row_sum();
                if (!res.reducible) res.method = "power-shifted";
            }
        }
        res.rho = std::max(res.rho, rho);
    }
    return res;
}

}  // namespace mechlab
