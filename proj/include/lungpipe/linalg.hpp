#pragma once

#include <cstddef>
#include <vector>

namespace lungpipe {

/// Dense row-major matrix. Small: everything here is O(p^3) with p in the
/// tens, so clarity and a fixed accumulation order win over speed.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n);
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
double dot(const std::vector<double>& a, const std::vector<double>& b);

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
/// `ok` is false when a non-positive pivot stops the factorization.
struct Cholesky {
    Matrix lower;
    bool ok = false;
    double log_det = 0; // of A, valid when ok
};

Cholesky cholesky(const Matrix& a);

std::vector<double> cholesky_solve(const Cholesky& chol, const std::vector<double>& b);

/// x^T A^{-1} x via one forward substitution.
double quad_form_inv(const Cholesky& chol, const std::vector<double>& x);

/// Solves A x = b for symmetric positive definite A; numeric_error otherwise.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b);

} // namespace lungpipe
