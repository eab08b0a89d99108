#pragma once

#include <cstddef>
#include <vector>

namespace catcast {

// Row-major dense matrix of doubles. The three matmul variants below are
// the hot path of training; they are written as straight loops in an
// order the compiler vectorizes.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double* operator[](std::size_t r) { return a.data() + r * cols; }
    const double* operator[](std::size_t r) const { return a.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    void zero() { a.assign(a.size(), 0.0); }
};

// C = A(m×k) * B(k×n)
inline void matmul(const double* A, const double* B, double* C,
                   std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = C + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        const double* ai = A + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = B + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

// C = A(m×k) * B^T where B is n×k
inline void matmul_nt(const double* A, const double* B, double* C,
                      std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = A + i * k;
        double* ci = C + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = B + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
}

// C += A^T(k×m) * B(m×n) where A is m×k; accumulates into C (k×n)
inline void matmul_tn_acc(const double* A, const double* B, double* C,
                          std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = A + i * k;
        const double* bi = B + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            double* cp = C + p * n;
            for (std::size_t j = 0; j < n; ++j) cp[j] += aip * bi[j];
        }
    }
}

} // namespace catcast
