// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2; entry is gated behind the runtime cpuid check in avx2_available().
//
// Lanes map to independent array slots (4 doubles per 256-bit op) and loop
// order matches the scalar reference exactly, so results are bitwise
// identical to scalar_ops().

#include "rad/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)

#include <immintrin.h>

namespace rad::kernels {

namespace {

void avx2_add(double* dst, const double* src, std::size_t n) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d d = _mm256_loadu_pd(dst + j);
        __m256d s = _mm256_loadu_pd(src + j);
        _mm256_storeu_pd(dst + j, _mm256_add_pd(d, s));
    }
    for (; j < n; ++j) dst[j] += src[j];
}

void avx2_sub(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d x = _mm256_loadu_pd(a + j);
        __m256d y = _mm256_loadu_pd(b + j);
        _mm256_storeu_pd(dst + j, _mm256_sub_pd(x, y));
    }
    for (; j < n; ++j) dst[j] = a[j] - b[j];
}

void avx2_sub_inplace(double* dst, const double* src, std::size_t n) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d d = _mm256_loadu_pd(dst + j);
        __m256d s = _mm256_loadu_pd(src + j);
        _mm256_storeu_pd(dst + j, _mm256_sub_pd(d, s));
    }
    for (; j < n; ++j) dst[j] -= src[j];
}

void avx2_sum_rows(double* out, const double* mat, std::size_t d,
                   const std::int32_t* rows, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = mat + std::size_t(rows[i]) * d;
        std::size_t j = 0;
        for (; j + 4 <= d; j += 4) {
            __m256d acc = _mm256_loadu_pd(out + j);
            __m256d v = _mm256_loadu_pd(r + j);
            _mm256_storeu_pd(out + j, _mm256_add_pd(acc, v));
        }
        for (; j < d; ++j) out[j] += r[j];
    }
}

const Ops kAvx2{avx2_add, avx2_sub, avx2_sub_inplace, avx2_sum_rows, "avx2"};

} // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2"); }

const Ops& avx2_ops() { return avx2_available() ? kAvx2 : scalar_ops(); }

} // namespace rad::kernels

#endif
