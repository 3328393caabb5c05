#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mechlab {

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double v = 0) : rows(r), cols(c), a(r * c, v) {}
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    std::vector<std::vector<double>> to_rows() const;
    double max_row_sum() const;
};

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& x);
std::vector<double> vec_mat(const std::vector<double>& x, const Matrix& m);

// Eigenvalues sorted descending; eigenvectors are the matching columns of `vectors`.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
    int sweeps = 0;
};

// Cyclic Jacobi rotations. `s` must be symmetric.
SymmetricEigen jacobi_eigen(Matrix s, double tol = 1e-15, int max_sweeps = 100);

struct PerronResult {
    double rho = 0;
    bool reducible = false;
    int iterations = 0;
    std::string method;
};

// Spectral radius of a nonnegative square matrix. Power iteration from the all-ones
// vector; periodic blocks switch to the shifted matrix A + I, reducible matrices are
// split into strongly connected components.
PerronResult spectral_radius_nonneg(const Matrix& a, double tol = 1e-10, int max_iter = 100000);

}  // namespace mechlab
