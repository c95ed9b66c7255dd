// NEON kernel variants for aarch64 (NEON is baseline there, no runtime probe
// needed). Same lane discipline as the AVX2 file: bitwise-identical to scalar.

#include "rad/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace rad::kernels {

namespace {

void neon_add(double* dst, const double* src, std::size_t n) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        float64x2_t d = vld1q_f64(dst + j);
        float64x2_t s = vld1q_f64(src + j);
        vst1q_f64(dst + j, vaddq_f64(d, s));
    }
    for (; j < n; ++j) dst[j] += src[j];
}

void neon_sub(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        float64x2_t x = vld1q_f64(a + j);
        float64x2_t y = vld1q_f64(b + j);
        vst1q_f64(dst + j, vsubq_f64(x, y));
    }
    for (; j < n; ++j) dst[j] = a[j] - b[j];
}

void neon_sub_inplace(double* dst, const double* src, std::size_t n) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        float64x2_t d = vld1q_f64(dst + j);
        float64x2_t s = vld1q_f64(src + j);
        vst1q_f64(dst + j, vsubq_f64(d, s));
    }
    for (; j < n; ++j) dst[j] -= src[j];
}

void neon_sum_rows(double* out, const double* mat, std::size_t d,
                   const std::int32_t* rows, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = mat + std::size_t(rows[i]) * d;
        std::size_t j = 0;
        for (; j + 2 <= d; j += 2) {
            float64x2_t acc = vld1q_f64(out + j);
            float64x2_t v = vld1q_f64(r + j);
            vst1q_f64(out + j, vaddq_f64(acc, v));
        }
        for (; j < d; ++j) out[j] += r[j];
    }
}

const Ops kNeon{neon_add, neon_sub, neon_sub_inplace, neon_sum_rows, "neon"};

} // namespace

const Ops& neon_ops() { return kNeon; }

} // namespace rad::kernels

#endif
