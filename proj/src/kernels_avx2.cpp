#include "robex/kernels.hpp"

#if defined(ROBEX_HAVE_AVX2)

#include <cpuid.h>
#include <immintrin.h>

namespace robex::kernels {

bool cpu_supports_avx2() {
    unsigned int eax, ebx, ecx, edx;
    if (__get_cpuid_max(0, nullptr) < 7) return false;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
    const bool fma = (ecx & (1u << 12)) != 0;
    __cpuid_count(7, 0, eax, ebx, ecx, edx);
    const bool avx2 = (ebx & (1u << 5)) != 0;
    return avx2 && fma;
}

namespace avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void matvec_transpose(const double* a, std::size_t rows, std::size_t cols, const double* x,
                      double* y) {
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

}  // namespace avx2
}  // namespace robex::kernels

#endif  // ROBEX_HAVE_AVX2
