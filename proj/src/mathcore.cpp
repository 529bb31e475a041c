#include "sobnn/mathcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sobnn {

namespace {

[[noreturn]] void shape_error(const std::string& what) {
    throw std::invalid_argument("shape mismatch: " + what);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        shape_error("matmul " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                    " * " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
    }
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols != x.size()) {
        shape_error("matvec " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                    " * vec " + std::to_string(x.size()));
    }
    Vector y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

Matrix outer(const Vector& u, const Vector& v) {
    Matrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    return m;
}

Vector hadamard(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) shape_error("hadamard lengths " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
    return c;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) shape_error("dot lengths " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double cosine_similarity(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) shape_error("cosine_similarity lengths " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu < 1e-300 || nv < 1e-300) return 0.0;
    return dot(u, v) / (nu * nv);
}

double erf(double x) {
    return std::erf(x);
}

}  // namespace sobnn
