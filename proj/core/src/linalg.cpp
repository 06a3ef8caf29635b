#include "evf/linalg.hpp"

#include <cmath>
#include <string>

namespace evf {

namespace {

[[noreturn]] void throw_shape(const char* op, std::size_t r, std::size_t c,
                              std::size_t n) {
    throw DimensionError(std::string(op) + ": matrix " + std::to_string(r) + "x" +
                         std::to_string(c) + " incompatible with vector of length " +
                         std::to_string(n));
}

}  // namespace

Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols != v.size()) throw_shape("matvec", m.rows, m.cols, v.size());
    Vector out(m.rows, 0.0);
    matvec_acc(m, v, out);
    return out;
}

void matvec_acc(const Matrix& m, const Vector& v, Vector& out) {
    if (m.cols != v.size() || m.rows != out.size())
        throw_shape("matvec_acc", m.rows, m.cols, v.size());
    const double* p = m.data.data();
    const double* x = v.data();
    const std::size_t c = m.cols;
    for (std::size_t i = 0; i < m.rows; ++i, p += c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += p[j] * x[j];
        out[i] += acc;
    }
}

Vector matvec_t(const Matrix& m, const Vector& v) {
    if (m.rows != v.size()) throw_shape("matvec_t", m.rows, m.cols, v.size());
    Vector out(m.cols, 0.0);
    matvec_t_acc(m, v, out);
    return out;
}

void matvec_t_acc(const Matrix& m, const Vector& v, Vector& out) {
    if (m.rows != v.size() || m.cols != out.size())
        throw_shape("matvec_t_acc", m.rows, m.cols, v.size());
    const std::size_t c = m.cols;
    const double* p = m.data.data();
    for (std::size_t i = 0; i < m.rows; ++i, p += c) {
        const double vi = v[i];
        for (std::size_t j = 0; j < c; ++j) out[j] += p[j] * vi;
    }
}

void add_outer(Matrix& m, const Vector& a, const Vector& x) {
    if (m.rows != a.size() || m.cols != x.size())
        throw_shape("add_outer", m.rows, m.cols, a.size());
    const std::size_t c = m.cols;
    double* p = m.data.data();
    for (std::size_t i = 0; i < m.rows; ++i, p += c) {
        const double ai = a[i];
        for (std::size_t j = 0; j < c; ++j) p[j] += ai * x[j];
    }
}

Vector sigmoid(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-v[i]));
    return out;
}

Vector tanh_v(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionError("hadamard: lengths " + std::to_string(a.size()) +
                             " and " + std::to_string(b.size()) + " differ");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionError("dot: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void add_inplace(Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionError("add_inplace: lengths " + std::to_string(a.size()) +
                             " and " + std::to_string(b.size()) + " differ");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace evf
