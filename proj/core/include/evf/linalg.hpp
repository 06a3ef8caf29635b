#pragma once

#include <cstddef>
#include <vector>

#include "evf/errors.hpp"

namespace evf {

using Vector = std::vector<double>;

/// Dense row-major matrix of 64-bit floats.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }
};

Matrix identity(std::size_t n);

/// m * v with 64-bit accumulation. Throws DimensionError on shape mismatch.
Vector matvec(const Matrix& m, const Vector& v);

/// m^T * v. Throws DimensionError when m.rows != v.size().
Vector matvec_t(const Matrix& m, const Vector& v);

/// out += m * v (no allocation).
void matvec_acc(const Matrix& m, const Vector& v, Vector& out);

/// out += m^T * v.
void matvec_t_acc(const Matrix& m, const Vector& v, Vector& out);

/// m += a * x^T (rank-one update).
void add_outer(Matrix& m, const Vector& a, const Vector& x);

Vector sigmoid(const Vector& v);
Vector tanh_v(const Vector& v);

/// Elementwise product. Throws DimensionError on length mismatch.
Vector hadamard(const Vector& a, const Vector& b);

double dot(const Vector& a, const Vector& b);

void add_inplace(Vector& a, const Vector& b);

}  // namespace evf
