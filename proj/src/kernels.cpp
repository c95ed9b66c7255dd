#include "rad/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace rad::kernels {

namespace {

void scalar_add(double* dst, const double* src, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) dst[j] += src[j];
}

void scalar_sub(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) dst[j] = a[j] - b[j];
}

void scalar_sub_inplace(double* dst, const double* src, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) dst[j] -= src[j];
}

void scalar_sum_rows(double* out, const double* mat, std::size_t d,
                     const std::int32_t* rows, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = mat + std::size_t(rows[i]) * d;
        for (std::size_t j = 0; j < d; ++j) out[j] += r[j];
    }
}

const Ops kScalar{scalar_add, scalar_sub, scalar_sub_inplace, scalar_sum_rows,
                  "scalar"};

const Ops& best_supported() {
#if defined(__aarch64__)
    return neon_ops();
#else
    if (avx2_available()) return avx2_ops();
    return kScalar;
#endif
}

const Ops& initial_choice() {
    if (const char* env = std::getenv("RAD_KERNELS")) {
        std::string v = env;
        if (v == "scalar") return kScalar;
        if (v == "avx2" && avx2_available()) return avx2_ops();
#if defined(__aarch64__)
        if (v == "neon") return neon_ops();
#endif
        // unknown or unsupported value: fall through to auto
    }
    return best_supported();
}

const Ops* g_active = nullptr;

} // namespace

const Ops& scalar_ops() { return kScalar; }

#if !defined(__x86_64__) && !defined(_M_X64) && !defined(__i386__)
bool avx2_available() { return false; }
const Ops& avx2_ops() { return kScalar; }
#endif

const Ops& active() {
    if (!g_active) g_active = &initial_choice();
    return *g_active;
}

void select(const std::string& name) {
    if (name == "auto") {
        g_active = &best_supported();
        return;
    }
    if (name == "scalar") {
        g_active = &kScalar;
        return;
    }
    if (name == "avx2") {
        if (!avx2_available())
            throw std::invalid_argument("avx2 kernels not supported on this CPU");
        g_active = &avx2_ops();
        return;
    }
#if defined(__aarch64__)
    if (name == "neon") {
        g_active = &neon_ops();
        return;
    }
#endif
    throw std::invalid_argument("unknown kernel backend: " + name);
}

} // namespace rad::kernels
