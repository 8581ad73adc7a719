#include "robex/kernels.hpp"

namespace robex::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void matvec_transpose(const double* a, std::size_t rows, std::size_t cols, const double* x,
                      double* y) {
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

}  // namespace robex::kernels::scalar
