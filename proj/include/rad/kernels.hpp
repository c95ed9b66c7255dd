#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace rad::kernels {

// Dense double-array primitives behind every sumstats hot loop: node stats
// accumulation over row lists, cellwise cube subtraction, MCV reconstruction.
//
// All variants keep the scalar evaluation order — SIMD lanes map to
// independent array slots and partial sums are never reassociated — so every
// backend produces bitwise-identical output. The equivalence tests assert
// exact equality, not a tolerance.
struct Ops {
    // dst[j] += src[j]
    void (*add)(double* dst, const double* src, std::size_t n);
    // dst[j] = a[j] - b[j]
    void (*sub)(double* dst, const double* a, const double* b, std::size_t n);
    // dst[j] -= src[j]
    void (*sub_inplace)(double* dst, const double* src, std::size_t n);
    // out[j] += sum_i mat[rows[i]*d + j], rows visited in order
    void (*sum_rows)(double* out, const double* mat, std::size_t d,
                     const std::int32_t* rows, std::size_t n);
    const char* name;
};

const Ops& scalar_ops();

bool avx2_available();
const Ops& avx2_ops(); // scalar fallback when unavailable

#if defined(__aarch64__)
const Ops& neon_ops();
#endif

// Active backend. Defaults to the best supported variant; overridable via
// select() or the RAD_KERNELS environment variable (auto|scalar|avx2|neon).
const Ops& active();
void select(const std::string& name); // throws std::invalid_argument

} // namespace rad::kernels
