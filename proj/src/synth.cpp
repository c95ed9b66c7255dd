#include "rad/synth.hpp"
#include "rad/errors.hpp"
#include "rad/rng.hpp"

namespace rad {

namespace {

Dataset synth_shell(std::size_t n_rows, int n_attributes) {
    if (n_rows == 0 || n_attributes < 1)
        throw ConfigError("synthetic data needs at least one row and one attribute");
    Dataset ds;
    for (int m = 0; m < n_attributes; ++m) {
        ds.attribute_names.push_back("a" + std::to_string(m));
        ds.levels.push_back({"0", "1"});
        ds.columns.emplace_back(n_rows, 0);
    }
    ds.target_names.push_back("y");
    ds.targets.emplace_back(n_rows, 0.0);
    return ds;
}

} // namespace

Dataset synth_iid(std::size_t n_rows, int n_attributes, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw ConfigError("synth_iid: p must lie in [0,1]");
    Dataset ds = synth_shell(n_rows, n_attributes);
    Rng rng(seed);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (int m = 0; m < n_attributes; ++m)
            ds.columns[std::size_t(m)][r] = rng.bernoulli(p) ? 1 : 0;
        ds.targets[0][r] = rng.dyadic(10, 16.0);
    }
    ds.validate();
    return ds;
}

Dataset synth_chain(std::size_t n_rows, int n_attributes, double lambda, std::uint64_t seed) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw ConfigError("synth_chain: lambda must lie in (0,1)");
    Dataset ds = synth_shell(n_rows, n_attributes);
    Rng rng(seed);
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::int32_t v = rng.bernoulli(lambda) ? 1 : 0;
        ds.columns[0][r] = v;
        for (int m = 1; m < n_attributes; ++m) {
            if (rng.bernoulli(lambda)) v = rng.bernoulli(lambda) ? 1 : 0;
            ds.columns[std::size_t(m)][r] = v;
        }
        ds.targets[0][r] = rng.dyadic(16, 8.0);
    }
    ds.validate();
    return ds;
}

} // namespace rad
