#include "rad/score.hpp"
#include "rad/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rad {

ScoreKind score_from_name(const std::string& name) {
    if (name == "mean") return ScoreKind::MeanTarget;
    if (name == "ent") return ScoreKind::NegEntropy;
    if (name == "var") return ScoreKind::NegVariance;
    if (name == "strength") return ScoreKind::Strength;
    if (name == "impact") return ScoreKind::Impact;
    if (name == "bgss") return ScoreKind::BetweenGroupSS;
    throw ConfigError("unknown score '" + name + "' (mean|ent|var|strength|impact|bgss)");
}

std::string score_name(ScoreKind kind) {
    switch (kind) {
    case ScoreKind::MeanTarget: return "mean";
    case ScoreKind::NegEntropy: return "ent";
    case ScoreKind::NegVariance: return "var";
    case ScoreKind::Strength: return "strength";
    case ScoreKind::Impact: return "impact";
    case ScoreKind::BetweenGroupSS: return "bgss";
    }
    return "?";
}

double match_count(ScoreKind kind, std::span<const double> s) {
    switch (kind) {
    case ScoreKind::NegEntropy:
    case ScoreKind::Strength: {
        double n = 0.0;
        for (double v : s) n += v;
        return n;
    }
    default:
        return s[0];
    }
}

double score_eval(ScoreKind kind, std::span<const double> s, const ScoreContext& ctx) {
    double n = match_count(kind, s);
    if (n <= 0.0 || n < double(ctx.n_support)) return kNegInf;
    switch (kind) {
    case ScoreKind::MeanTarget:
        return s[1] / s[0];
    case ScoreKind::NegEntropy: {
        double h = 0.0;
        for (double v : s)
            if (v > 0.0) {
                double p = v / n;
                h += p * std::log(p);
            }
        return h;
    }
    case ScoreKind::NegVariance: {
        // -max(0, .) keeps the <= 0 invariant under floating cancellation.
        double num = s[0] * s[2] - s[1] * s[1];
        return -std::max(0.0, num) / (s[0] * s[0]);
    }
    case ScoreKind::Strength: {
        double best = 0.0;
        for (double v : s) best = std::max(best, v);
        return best / n;
    }
    case ScoreKind::Impact: {
        double mu_g = ctx.global[1] / ctx.global[0];
        return s[1] - s[0] * mu_g; // n_r*(mu_r - mu_g), without the 0/0 detour
    }
    case ScoreKind::BetweenGroupSS: {
        double N = ctx.n_global;
        if (s[0] >= N) return kNegInf; // indicator constant over all rows
        double mu_bar = ctx.global[1] / ctx.global[0];
        double diff = s[1] / s[0] - mu_bar;
        return s[0] * N / (N - s[0]) * diff * diff;
    }
    }
    return kNegInf;
}

bool score_has_bound(ScoreKind kind) {
    return kind == ScoreKind::Strength || kind == ScoreKind::Impact;
}

double score_bound(ScoreKind kind, std::span<const double> s, const ScoreContext& ctx) {
    if (!score_has_bound(kind))
        throw ConfigError("score '" + score_name(kind) + "' has no optimistic bound");
    double n = match_count(kind, s);
    if (n < double(ctx.n_support) || n <= 0.0) return kNegInf;
    if (kind == ScoreKind::Strength) return 1.0;
    // IMPACT: every specialization keeps <= n rows, each contributing at most
    // (max_target - mu_g); max_target >= mu_g so the bound is monotone in n.
    double mu_g = ctx.global[1] / ctx.global[0];
    return s[0] * (ctx.max_target - mu_g);
}

void check_spec_shape(ScoreKind kind, const StatVecSpec& spec) {
    using K = StatVecSpec::Kind;
    const auto& c = spec.components();
    auto fail = [&](const char* want) {
        throw ConfigError("score '" + score_name(kind) + "' requires statvec " + want);
    };
    switch (kind) {
    case ScoreKind::MeanTarget:
    case ScoreKind::Impact:
    case ScoreKind::BetweenGroupSS:
        if (c.size() != 2 || c[0].kind != K::ConstantOne || c[1].kind != K::Target)
            fail("[CONSTANT_ONE, TARGET]");
        break;
    case ScoreKind::NegVariance:
        if (c.size() != 3 || c[0].kind != K::ConstantOne || c[1].kind != K::Target ||
            c[2].kind != K::TargetSquared)
            fail("[CONSTANT_ONE, TARGET, TARGET_SQUARED]");
        break;
    case ScoreKind::NegEntropy:
    case ScoreKind::Strength:
        if (c.size() != 1 || c[0].kind != K::OneHot) fail("[ONE_HOT(output)]");
        break;
    }
}

StatVecSpec spec_for_score(ScoreKind kind, const Dataset& ds, const std::string& column) {
    switch (kind) {
    case ScoreKind::MeanTarget:
    case ScoreKind::Impact:
    case ScoreKind::BetweenGroupSS:
        return StatVecSpec::count_and_target(ds, column);
    case ScoreKind::NegVariance:
        return StatVecSpec::count_target_square(ds, column);
    case ScoreKind::NegEntropy:
    case ScoreKind::Strength:
        return StatVecSpec::one_hot(ds, column);
    }
    throw ConfigError("bad score kind");
}

} // namespace rad
