#pragma once

#include "rad/dataset.hpp"

#include <cstdint>
#include <string>

namespace rad {

// Binary attributes a0..a(M-1), iid Bernoulli(p), plus target y on a dyadic
// grid (exact double sums at desk scale). Compressibility is min(p, 1-p) at
// every rowtree level because the attributes are independent.
Dataset synth_iid(std::size_t n_rows, int n_attributes, double p, std::uint64_t seed);

// Correlated binary attributes: a0 ~ Bernoulli(lambda); each later attribute
// copies its predecessor with probability 1-lambda, else resamples
// Bernoulli(lambda). Marginals stay Bernoulli(lambda) and the measured
// compressibility lands near lambda (targeting is approximate).
Dataset synth_chain(std::size_t n_rows, int n_attributes, double lambda, std::uint64_t seed);

} // namespace rad
