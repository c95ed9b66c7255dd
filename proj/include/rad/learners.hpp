#pragma once

#include "rad/dataset.hpp"
#include "rad/rule.hpp"
#include "rad/search.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rad {

// Ordered if/else-if chain over one categorical output attribute.
struct DecisionList {
    struct Entry {
        Rule rule;
        std::int32_t label;               // predicted class code
        std::vector<double> distribution; // training class counts at learn time
    };
    int output_attribute = -1;
    std::vector<Entry> entries;
    std::int32_t default_label = 0;

    std::int32_t predict(const Dataset& ds, std::size_t row) const;
    std::string to_text(const Dataset& ds) const;
};

// Same chain shape with real-valued predictions.
struct RegressionList {
    struct Entry {
        Rule rule;
        double value;
    };
    std::string target;
    std::vector<Entry> entries;
    double default_value = 0.0;

    double predict(const Dataset& ds, std::size_t row) const;
    std::string to_text(const Dataset& ds) const;
};

// Additive model over rule indicators: intercept + sum of matching terms.
struct AdditiveRuleModel {
    struct Term {
        Rule rule;
        double coefficient;
    };
    std::string target;
    double intercept = 0.0;
    std::vector<Term> terms;
    bool stopped_on_collinearity = false;

    double predict(const Dataset& ds, std::size_t row) const;
    std::string to_text(const Dataset& ds) const;
};

// Greedy cover loop: best NEG_ENTROPY rule over the remaining rows, predict
// its majority class, drop its matches, repeat while support lasts.
DecisionList learn_dlist(const Dataset& ds, const std::string& output_attribute,
                         SearchConfig cfg, Searcher searcher);

// Same loop maximizing mean target; predicts the matched mean.
RegressionList learn_reglist(const Dataset& ds, const std::string& target, SearchConfig cfg,
                             Searcher searcher);

// Stepwise additive regression: each round searches the residuals for the
// rule explaining the most between-group variance, then refits all
// coefficients jointly.
AdditiveRuleModel learn_radreg(const Dataset& ds, const std::string& target, SearchConfig cfg,
                               Searcher searcher, int max_terms);

struct LeastSquares {
    std::vector<double> coef; // one per design column
    bool rank_deficient = false;
};

// Normal equations with an eigendecomposition pseudo-inverse: full-rank
// designs get the unique minimizer, rank-deficient ones the minimal-norm
// solution plus a flag. `columns` must include the intercept column.
LeastSquares least_squares_fit(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& y);

enum class LearnerKind { DList, RegList, RadReg };

struct LearnerSpec {
    LearnerKind kind = LearnerKind::DList;
    std::string column; // output attribute (dlist) or target (reglist/radreg)
    SearchConfig cfg;
    Searcher searcher = Searcher::Rad;
    int max_terms = 1; // radreg only
};

struct KFoldResult {
    std::vector<double> fold_losses; // misclassification rate or MSE
    double mean = 0.0;
    double std_error = 0.0;
};

// Deterministic shuffled partition into `folds` blocks; train on the rest,
// evaluate on the block.
KFoldResult kfold_eval(const Dataset& ds, const LearnerSpec& spec, int folds,
                       std::uint64_t seed);

} // namespace rad
