#include <immintrin.h>

#include "erl/kernels.hpp"

// AVX2/FMA variants of the stencil dot kernels. Four independent accumulators
// hide the FMA latency; the tail runs scalar. Accumulation order differs from
// the scalar lane, so cross-lane agreement is a tolerance, not bit equality.

namespace erl::kern {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
    double s = hsum(acc0);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void dot2_avx2(const double* a, const double* bx, const double* by, std::size_t n,
               double* sx, double* sy) {
    __m256d ax0 = _mm256_setzero_pd();
    __m256d ax1 = _mm256_setzero_pd();
    __m256d ay0 = _mm256_setzero_pd();
    __m256d ay1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d va0 = _mm256_loadu_pd(a + i);
        const __m256d va1 = _mm256_loadu_pd(a + i + 4);
        ax0 = _mm256_fmadd_pd(va0, _mm256_loadu_pd(bx + i), ax0);
        ax1 = _mm256_fmadd_pd(va1, _mm256_loadu_pd(bx + i + 4), ax1);
        ay0 = _mm256_fmadd_pd(va0, _mm256_loadu_pd(by + i), ay0);
        ay1 = _mm256_fmadd_pd(va1, _mm256_loadu_pd(by + i + 4), ay1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        ax0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(bx + i), ax0);
        ay0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(by + i), ay0);
    }
    double x = hsum(_mm256_add_pd(ax0, ax1));
    double y = hsum(_mm256_add_pd(ay0, ay1));
    for (; i < n; ++i) {
        x += a[i] * bx[i];
        y += a[i] * by[i];
    }
    *sx = x;
    *sy = y;
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{dot_avx2, dot2_avx2};
    return k;
}

}  // namespace erl::kern
