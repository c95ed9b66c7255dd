#pragma once

#include "rad/dataset.hpp"
#include "rad/statvec.hpp"

#include <limits>
#include <span>
#include <string>

namespace rad {

enum class ScoreKind { MeanTarget, NegEntropy, NegVariance, Strength, Impact, BetweenGroupSS };

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// CLI names: mean | ent | var | strength | impact | bgss.
ScoreKind score_from_name(const std::string& name); // throws ConfigError
std::string score_name(ScoreKind kind);

// Immutable per-search context every score evaluation shares.
struct ScoreContext {
    std::size_t n_support = 1;
    std::vector<double> global; // sumstats over all in-play rows
    double n_global = 0.0;      // in-play row count
    double max_target = 0.0;    // max target over in-play rows (IMPACT bound)
};

// Number of matching rows encoded in a sumstats vector: component 0 for
// count-leading specs, the sum of all components for one-hot specs.
double match_count(ScoreKind kind, std::span<const double> s);

// Returns -inf whenever the match count is below ctx.n_support or zero.
double score_eval(ScoreKind kind, std::span<const double> s, const ScoreContext& ctx);

// Optimistic bound over all specializations (STRENGTH and IMPACT only).
bool score_has_bound(ScoreKind kind);
double score_bound(ScoreKind kind, std::span<const double> s, const ScoreContext& ctx); // throws ConfigError

// Validates that the spec has exactly the component shape the score needs.
void check_spec_shape(ScoreKind kind, const StatVecSpec& spec); // throws ConfigError

// Builds that shape: `column` is the target name (mean/var/impact/bgss) or
// the output attribute name (ent/strength).
StatVecSpec spec_for_score(ScoreKind kind, const Dataset& ds, const std::string& column);

} // namespace rad
