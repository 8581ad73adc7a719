#pragma once

#include <cstddef>

// Low-level arithmetic kernels used by the hot evaluation loops (spectral
// evaluation at quadrature nodes, weighted quadrature reductions, trajectory
// assembly). A scalar reference implementation is always available; an AVX2
// variant is selected at runtime when the CPU supports it. The two backends
// are equivalence-tested against each other.
namespace robex::kernels {

enum class Backend { Scalar, Avx2 };

// Backend chosen at startup: AVX2 if compiled in and the CPU supports it,
// scalar otherwise. ROBEX_KERNELS=scalar|avx2 in the environment overrides.
Backend active_backend();
const char* backend_name(Backend b);

// Force a specific backend (tests). Throws std::invalid_argument if the
// requested backend is unavailable on this machine.
void force_backend(Backend b);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i w[i] * a[i] * b[i] -- quadrature inner products
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// out[i] = a[i] * b[i]
void hadamard(const double* a, const double* b, double* out, std::size_t n);

// y = A x, A row-major (rows x cols)
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// y = A^T x, A row-major (rows x cols), y has length cols
void matvec_transpose(const double* a, std::size_t rows, std::size_t cols, const double* x,
                      double* y);

inline double weighted_sumsq(const double* w, const double* a, std::size_t n) {
    return weighted_dot(w, a, a, n);
}

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void matvec_transpose(const double* a, std::size_t rows, std::size_t cols, const double* x,
                      double* y);
}  // namespace scalar

#if defined(ROBEX_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void matvec_transpose(const double* a, std::size_t rows, std::size_t cols, const double* x,
                      double* y);
}  // namespace avx2

bool cpu_supports_avx2();
#endif

}  // namespace robex::kernels
