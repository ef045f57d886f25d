#include "lungpipe/linalg.hpp"

#include <cmath>

#include "lungpipe/errors.hpp"

namespace lungpipe {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw argument_error("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0;
            for (std::size_t k = 0; k < a.cols; ++k)
                acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols != x.size())
        throw argument_error("matvec: dimension mismatch");
    std::vector<double> y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double acc = 0;
        for (std::size_t k = 0; k < a.cols; ++k)
            acc += a(i, k) * x[k];
        y[i] = acc;
    }
    return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw argument_error("dot: dimension mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

Cholesky cholesky(const Matrix& a) {
    if (a.rows != a.cols)
        throw argument_error("cholesky: matrix not square");
    const std::size_t n = a.rows;
    Cholesky result;
    result.lower = Matrix(n, n);
    Matrix& l = result.lower;
    double log_det = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k)
            diag -= l(j, k) * l(j, k);
        if (!(diag > 0) || !std::isfinite(diag))
            return result; // ok stays false
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        log_det += 2.0 * std::log(ljj);
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                acc -= l(i, k) * l(j, k);
            l(i, j) = acc / ljj;
        }
    }
    result.ok = true;
    result.log_det = log_det;
    return result;
}

std::vector<double> cholesky_solve(const Cholesky& chol, const std::vector<double>& b) {
    if (!chol.ok)
        throw numeric_error("cholesky_solve: factorization not positive definite");
    const Matrix& l = chol.lower;
    const std::size_t n = l.rows;
    if (b.size() != n)
        throw argument_error("cholesky_solve: dimension mismatch");

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k)
            acc -= l(i, k) * y[k];
        y[i] = acc / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k)
            acc -= l(k, ii) * x[k];
        x[ii] = acc / l(ii, ii);
    }
    return x;
}

double quad_form_inv(const Cholesky& chol, const std::vector<double>& x) {
    if (!chol.ok)
        throw numeric_error("quad_form_inv: factorization not positive definite");
    const Matrix& l = chol.lower;
    const std::size_t n = l.rows;
    if (x.size() != n)
        throw argument_error("quad_form_inv: dimension mismatch");
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = x[i];
        for (std::size_t k = 0; k < i; ++k)
            acc -= l(i, k) * z[k];
        z[i] = acc / l(i, i);
    }
    double q = 0;
    for (std::size_t i = 0; i < n; ++i)
        q += z[i] * z[i];
    return q;
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
    const Cholesky chol = cholesky(a);
    if (!chol.ok)
        throw numeric_error("solve_spd: matrix not positive definite");
    return cholesky_solve(chol, b);
}

} // namespace lungpipe
