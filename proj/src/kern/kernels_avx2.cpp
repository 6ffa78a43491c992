// AVX2 + FMA variants of the batch kernels. This translation unit is compiled
// with -mavx2 -mfma; the dispatcher only routes here after a cpuid check.

#include <immintrin.h>

#include "loglin/kern/kernels.hpp"

namespace loglin::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

} // namespace

void gauss2_misfit(const Gauss2Inputs& in, double* quad, double* det) {
    std::size_t i = 0;
    for (; i + 4 <= in.n_samples; i += 4) {
        const __m256d a = _mm256_loadu_pd(in.c00 + i);
        const __m256d b = _mm256_loadu_pd(in.c01 + i);
        const __m256d c = _mm256_loadu_pd(in.c11 + i);
        const __m256d dt = _mm256_fmsub_pd(a, c, _mm256_mul_pd(b, b));
        const __m256d i00 = _mm256_div_pd(c, dt);
        const __m256d i01 = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), b), dt);
        const __m256d i11 = _mm256_div_pd(a, dt);
        const __m256d mx = _mm256_loadu_pd(in.mx + i);
        const __m256d my = _mm256_loadu_pd(in.my + i);
        __m256d q = _mm256_setzero_pd();
        for (std::size_t j = 0; j < in.n_points; ++j) {
            const __m256d dx = _mm256_sub_pd(_mm256_set1_pd(in.yx[j]), mx);
            const __m256d dy = _mm256_sub_pd(_mm256_set1_pd(in.yy[j]), my);
            const __m256d tx = _mm256_fmadd_pd(i00, dx, _mm256_mul_pd(i01, dy));
            const __m256d ty = _mm256_fmadd_pd(i01, dx, _mm256_mul_pd(i11, dy));
            q = _mm256_fmadd_pd(dx, tx, q);
            q = _mm256_fmadd_pd(dy, ty, q);
        }
        _mm256_storeu_pd(quad + i, q);
        _mm256_storeu_pd(det + i, dt);
    }
    if (i < in.n_samples) {
        Gauss2Inputs tail = in;
        tail.mx += i;
        tail.my += i;
        tail.c00 += i;
        tail.c01 += i;
        tail.c11 += i;
        tail.n_samples = in.n_samples - i;
        scalar::gauss2_misfit(tail, quad + i, det + i);
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double out = hsum(acc);
    for (; i < n; ++i) out += a[i] * b[i];
    return out;
}

double max_value(const double* v, std::size_t n) {
    if (n < 4) return scalar::max_value(v, n);
    __m256d acc = _mm256_loadu_pd(v);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(v + i));
    double out = hmax(acc);
    for (; i < n; ++i)
        if (v[i] > out) out = v[i];
    return out;
}

} // namespace loglin::kern::avx2
