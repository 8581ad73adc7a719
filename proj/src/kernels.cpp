#include "robex/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace robex::kernels {

namespace {

Backend resolve_default() {
#if defined(ROBEX_HAVE_AVX2)
    Backend picked = cpu_supports_avx2() ? Backend::Avx2 : Backend::Scalar;
#else
    Backend picked = Backend::Scalar;
#endif
    if (const char* env = std::getenv("ROBEX_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) picked = Backend::Scalar;
#if defined(ROBEX_HAVE_AVX2)
        if (std::strcmp(env, "avx2") == 0 && cpu_supports_avx2()) picked = Backend::Avx2;
#endif
    }
    return picked;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{resolve_default()};
    return backend;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void force_backend(Backend b) {
#if defined(ROBEX_HAVE_AVX2)
    if (b == Backend::Avx2 && !cpu_supports_avx2())
        throw std::invalid_argument("avx2 backend not supported on this CPU");
#else
    if (b == Backend::Avx2) throw std::invalid_argument("avx2 backend not compiled in");
#endif
    current().store(b, std::memory_order_relaxed);
}

#if defined(ROBEX_HAVE_AVX2)
#define ROBEX_DISPATCH(fn, ...) \
    return active_backend() == Backend::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define ROBEX_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { ROBEX_DISPATCH(dot, a, b, n); }

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    ROBEX_DISPATCH(weighted_dot, w, a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    ROBEX_DISPATCH(axpy, alpha, x, y, n);
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    ROBEX_DISPATCH(hadamard, a, b, out, n);
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    ROBEX_DISPATCH(matvec, a, rows, cols, x, y);
}

void matvec_transpose(const double* a, std::size_t rows, std::size_t cols, const double* x,
                      double* y) {
    ROBEX_DISPATCH(matvec_transpose, a, rows, cols, x, y);
}

#undef ROBEX_DISPATCH

}  // namespace robex::kernels
