#pragma once

#include <cstddef>
#include <vector>

namespace sobnn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix transpose(const Matrix& a);
Matrix outer(const Vector& u, const Vector& v);

Vector hadamard(const Vector& a, const Vector& b);
double dot(const Vector& a, const Vector& b);
double l2_norm(const Vector& v);

/// dot(u,v) / (|u||v|); returns 0 when either norm is below 1e-300.
double cosine_similarity(const Vector& u, const Vector& v);

/// Gauss error function.
double erf(double x);

}  // namespace sobnn
