#pragma once

#include "rad/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rad {

// Per-row statistics vector definition. A spec is an ordered list of
// components; ONE_HOT expands to one indicator per level at construction, so
// dim() is the expanded width. All validation (unknown attribute/target,
// value out of range) happens in the constructor — evaluation never throws.
class StatVecSpec {
  public:
    enum class Kind : std::uint8_t { ConstantOne, Indicator, OneHot, Target, TargetSquared };

    struct Component {
        Kind kind;
        std::string attribute; // Indicator / OneHot
        int value = -1;        // Indicator
        std::string target;    // Target / TargetSquared
    };

    // Unset sentinel (dim() == 0); every consumer validates before use.
    StatVecSpec() = default;
    StatVecSpec(const Dataset& ds, std::vector<Component> components); // throws ConfigError

    std::size_t dim() const { return expanded_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Component>& components() const { return components_; }

    // Number of leading components whose row value is the exact row count
    // contribution: 1 for a leading CONSTANT_ONE, arity for a leading
    // ONE_HOT, 0 otherwise. Scores use this for the support gate.
    std::size_t leading_count() const { return leading_count_; }

    // Target index of the first TARGET component, if any (IMPACT bound).
    int first_target() const { return first_target_; }

    void eval_row(const Dataset& ds, std::size_t row, double* out) const;

    static StatVecSpec count_only(const Dataset& ds);
    static StatVecSpec count_and_target(const Dataset& ds, const std::string& target);
    static StatVecSpec count_target_square(const Dataset& ds, const std::string& target);
    static StatVecSpec one_hot(const Dataset& ds, const std::string& attribute);

  private:
    struct Expanded {
        Kind kind;
        int attribute = -1; // resolved index
        std::int32_t value = -1;
        int target = -1;
    };
    std::vector<Component> components_;
    std::vector<Expanded> expanded_;
    std::vector<std::string> labels_;
    std::size_t leading_count_ = 0;
    int first_target_ = -1;
};

// Convenience: one freshly allocated statvec for a single row.
std::vector<double> eval_statvec(const Dataset& ds, const StatVecSpec& spec, std::size_t row);

// Row-major R x d matrix of statvecs, the input every searcher consumes.
struct StatMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> data; // rows * dim, row-major

    const double* row(std::size_t r) const { return data.data() + r * dim; }
};

StatMatrix materialize(const Dataset& ds, const StatVecSpec& spec);

} // namespace rad
