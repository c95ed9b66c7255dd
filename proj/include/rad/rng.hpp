#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rad {

// Deterministic RNG helpers. mt19937_64 output is fixed by the standard, and
// all derived draws below avoid std distributions (whose algorithms are
// implementation-defined), so a seed pins results across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t u64() { return gen_(); }

    // Uniform in [0,1) with 53 significant bits.
    double unit() { return double(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    // Uniform integer in [0, n). Modulo bias is < n/2^64, irrelevant here.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    // Uniform on the dyadic grid {i * 2^-bits : 0 <= i < span * 2^bits}.
    // Sums and differences of such values stay exact in double arithmetic
    // for desk-scale row counts.
    double dyadic(int bits, double span) {
        std::uint64_t cells = std::uint64_t(span * double(std::uint64_t(1) << bits));
        return double(below(cells)) * (1.0 / double(std::uint64_t(1) << bits));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace rad
