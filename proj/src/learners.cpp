#include "rad/learners.hpp"
#include "rad/errors.hpp"
#include "rad/rng.hpp"
#include "rad/statvec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace rad {

namespace {

std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::vector<std::int32_t> all_rows(const Dataset& ds) {
    std::vector<std::int32_t> rows(ds.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

std::vector<std::int32_t> resolve_rows(const Dataset& ds, const SearchConfig& cfg) {
    if (cfg.in_play_rows) return *cfg.in_play_rows;
    return all_rows(ds);
}

void check_learner_searcher(Searcher s) {
    if (s != Searcher::Rad && s != Searcher::Hill)
        throw ConfigError("learners drive rad or hill searches only");
}

std::int32_t majority_code(const Dataset& ds, int attr, const std::vector<std::int32_t>& rows,
                           const std::vector<std::int32_t>& fallback_rows) {
    const auto& rs = rows.empty() ? fallback_rows : rows;
    std::vector<std::size_t> counts(std::size_t(ds.arity(attr)), 0);
    for (std::int32_t r : rs) ++counts[std::size_t(ds.columns[std::size_t(attr)][std::size_t(r)])];
    std::int32_t best = 0;
    for (std::int32_t v = 1; v < ds.arity(attr); ++v)
        if (counts[std::size_t(v)] > counts[std::size_t(best)]) best = v; // ties stay low
    return best;
}

double mean_target(const Dataset& ds, int target, const std::vector<std::int32_t>& rows,
                   const std::vector<std::int32_t>& fallback_rows) {
    const auto& rs = rows.empty() ? fallback_rows : rows;
    if (rs.empty()) return 0.0;
    double sum = 0.0;
    for (std::int32_t r : rs) sum += ds.targets[std::size_t(target)][std::size_t(r)];
    return sum / double(rs.size());
}

// Rows of `rows` not matched by `ru`, order preserved.
std::vector<std::int32_t> remove_matched(const Dataset& ds, const Rule& ru,
                                         const std::vector<std::int32_t>& rows) {
    std::vector<std::int32_t> out;
    out.reserve(rows.size());
    for (std::int32_t r : rows)
        if (!ru.matches(ds, std::size_t(r))) out.push_back(r);
    return out;
}

} // namespace

std::int32_t DecisionList::predict(const Dataset& ds, std::size_t row) const {
    for (const auto& e : entries)
        if (e.rule.matches(ds, row)) return e.label;
    return default_label;
}

std::string DecisionList::to_text(const Dataset& ds) const {
    const std::string& name = ds.attribute_names[std::size_t(output_attribute)];
    const auto& levels = ds.levels[std::size_t(output_attribute)];
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        out += (i == 0 ? "if " : "else if ");
        out += entries[i].rule.to_string(ds) + " then " + name + "=" +
               levels[std::size_t(entries[i].label)] + "\n";
    }
    out += (entries.empty() ? std::string("always ") : std::string("else ")) + name + "=" +
           levels[std::size_t(default_label)] + "\n";
    return out;
}

double RegressionList::predict(const Dataset& ds, std::size_t row) const {
    for (const auto& e : entries)
        if (e.rule.matches(ds, row)) return e.value;
    return default_value;
}

std::string RegressionList::to_text(const Dataset& ds) const {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        out += (i == 0 ? "if " : "else if ");
        out += entries[i].rule.to_string(ds) + " then predict " + target + "=" +
               fmt2(entries[i].value) + "\n";
    }
    out += (entries.empty() ? std::string("always predict ") : std::string("else predict ")) +
           target + "=" + fmt2(default_value) + "\n";
    return out;
}

double AdditiveRuleModel::predict(const Dataset& ds, std::size_t row) const {
    double v = intercept;
    for (const auto& t : terms)
        if (t.rule.matches(ds, row)) v += t.coefficient;
    return v;
}

std::string AdditiveRuleModel::to_text(const Dataset& ds) const {
    std::string out = "begin with " + target + " = " + fmt2(intercept) + "\n";
    for (const auto& t : terms) {
        out += "if " + t.rule.to_string(ds);
        out += t.coefficient < 0 ? " subtract " + fmt2(-t.coefficient)
                                 : " add " + fmt2(t.coefficient);
        out += "\n";
    }
    return out;
}

DecisionList learn_dlist(const Dataset& ds, const std::string& output_attribute,
                         SearchConfig cfg, Searcher searcher) {
    check_learner_searcher(searcher);
    int out_attr = ds.attribute_index(output_attribute);
    if (out_attr < 0) throw ConfigError("unknown output attribute '" + output_attribute + "'");

    DecisionList dl;
    dl.output_attribute = out_attr;

    std::vector<std::int32_t> initial = resolve_rows(ds, cfg);
    std::vector<std::int32_t> remaining = initial;
    if (ds.arity(out_attr) < 2) { // degenerate output: nothing to separate
        dl.default_label = 0;
        return dl;
    }

    cfg.score = ScoreKind::NegEntropy;
    cfg.spec = StatVecSpec::one_hot(ds, output_attribute);
    cfg.top_n = 1;
    if (std::find(cfg.excluded_attributes.begin(), cfg.excluded_attributes.end(), out_attr) ==
        cfg.excluded_attributes.end())
        cfg.excluded_attributes.push_back(out_attr);

    std::size_t floor_rows = std::max<std::size_t>(cfg.n_support, 1);
    while (remaining.size() >= floor_rows) {
        cfg.in_play_rows = remaining;
        SearchResult res = run_search(searcher, ds, cfg);
        if (res.rules.empty()) break;
        const ScoredRule& best = res.rules.front();
        if (best.rule.empty()) break; // remaining set itself is the best group
        std::int32_t label = 0;
        for (std::size_t j = 1; j < best.stats.size(); ++j)
            if (best.stats[j] > best.stats[std::size_t(label)]) label = std::int32_t(j);
        dl.entries.push_back({best.rule, label, best.stats});
        remaining = remove_matched(ds, best.rule, remaining);
    }

    dl.default_label = majority_code(ds, out_attr, remaining, initial);
    return dl;
}

RegressionList learn_reglist(const Dataset& ds, const std::string& target, SearchConfig cfg,
                             Searcher searcher) {
    check_learner_searcher(searcher);
    int t = ds.target_index(target);
    if (t < 0) throw ConfigError("unknown target '" + target + "'");

    RegressionList rl;
    rl.target = target;

    std::vector<std::int32_t> initial = resolve_rows(ds, cfg);
    std::vector<std::int32_t> remaining = initial;

    cfg.score = ScoreKind::MeanTarget;
    cfg.spec = StatVecSpec::count_and_target(ds, target);
    cfg.top_n = 1;

    std::size_t floor_rows = std::max<std::size_t>(cfg.n_support, 1);
    while (remaining.size() >= floor_rows) {
        cfg.in_play_rows = remaining;
        SearchResult res = run_search(searcher, ds, cfg);
        if (res.rules.empty()) break;
        const ScoredRule& best = res.rules.front();
        if (best.rule.empty()) break;
        rl.entries.push_back({best.rule, best.stats[1] / best.stats[0]});
        remaining = remove_matched(ds, best.rule, remaining);
    }

    rl.default_value = mean_target(ds, t, remaining, initial);
    return rl;
}

AdditiveRuleModel learn_radreg(const Dataset& ds, const std::string& target, SearchConfig cfg,
                               Searcher searcher, int max_terms) {
    check_learner_searcher(searcher);
    if (max_terms < 1) throw ConfigError("radreg: max_terms must be >= 1");
    int t = ds.target_index(target);
    if (t < 0) throw ConfigError("unknown target '" + target + "'");

    std::vector<std::int32_t> rows = resolve_rows(ds, cfg);
    if (rows.empty()) throw ConfigError("radreg: no in-play rows");

    std::vector<double> y;
    y.reserve(rows.size());
    for (std::int32_t r : rows) y.push_back(ds.targets[std::size_t(t)][std::size_t(r)]);

    AdditiveRuleModel model;
    model.target = target;
    model.intercept = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());

    std::vector<std::vector<double>> columns{std::vector<double>(rows.size(), 1.0)};
    std::vector<double> coef{model.intercept};

    cfg.score = ScoreKind::BetweenGroupSS;
    cfg.top_n = 1;
    cfg.in_play_rows = rows;

    for (int iter = 0; iter < max_terms; ++iter) {
        // Residuals live in a scratch target column of a dataset copy; rows
        // outside the in-play set keep zeros and are never consulted.
        std::vector<double> residual_full(ds.n_rows(), 0.0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double pred = 0.0;
            for (std::size_t c = 0; c < columns.size(); ++c) pred += coef[c] * columns[c][i];
            residual_full[std::size_t(rows[i])] = y[i] - pred;
        }
        Dataset resid_ds = ds.with_target("__residual__", std::move(residual_full));
        cfg.spec = StatVecSpec::count_and_target(resid_ds, "__residual__");

        SearchResult res = run_search(searcher, resid_ds, cfg);
        if (res.rules.empty() || res.rules.front().score <= 0.0) break;
        const Rule& rule = res.rules.front().rule;

        bool duplicate = false;
        for (const auto& term : model.terms) duplicate = duplicate || term.rule == rule;
        if (duplicate) {
            model.stopped_on_collinearity = true;
            break;
        }

        std::vector<double> indicator(rows.size(), 0.0);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rule.matches(ds, std::size_t(rows[i]))) indicator[i] = 1.0;
        columns.push_back(std::move(indicator));

        LeastSquares fit = least_squares_fit(columns, y);
        if (fit.rank_deficient) {
            columns.pop_back();
            model.stopped_on_collinearity = true;
            break;
        }

        coef = fit.coef;
        model.intercept = coef[0];
        model.terms.push_back({rule, 0.0});
        for (std::size_t j = 0; j < model.terms.size(); ++j)
            model.terms[j].coefficient = coef[j + 1];
    }
    return model;
}

LeastSquares least_squares_fit(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& y) {
    if (columns.empty()) throw ContractViolation("least_squares_fit: no design columns");
    std::size_t p = columns.size(), n = y.size();
    for (const auto& c : columns)
        if (c.size() != n) throw ContractViolation("least_squares_fit: column length mismatch");

    // Normal equations.
    std::vector<double> a(p * p, 0.0), b(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += columns[i][r] * columns[j][r];
            a[i * p + j] = a[j * p + i] = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += columns[i][r] * y[r];
        b[i] = s;
    }

    double max_diag = 0.0;
    for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, a[i * p + i]);
    double tol = 1e-10 * max_diag;

    // Jacobi eigendecomposition of the (tiny) symmetric matrix: a = v d v^T.
    std::vector<double> v(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) v[i * p + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off += std::abs(a[i * p + j]);
        if (off < 1e-14 * std::max(max_diag, 1.0)) break;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) {
                double apq = a[i * p + j];
                if (apq == 0.0) continue;
                double theta = (a[j * p + j] - a[i * p + i]) / (2.0 * apq);
                double sign = theta >= 0.0 ? 1.0 : -1.0;
                double tau = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(tau * tau + 1.0);
                double s = tau * c;
                for (std::size_t m = 0; m < p; ++m) {
                    double aim = a[i * p + m], ajm = a[j * p + m];
                    a[i * p + m] = c * aim - s * ajm;
                    a[j * p + m] = s * aim + c * ajm;
                }
                for (std::size_t m = 0; m < p; ++m) {
                    double ami = a[m * p + i], amj = a[m * p + j];
                    a[m * p + i] = c * ami - s * amj;
                    a[m * p + j] = s * ami + c * amj;
                    double vmi = v[m * p + i], vmj = v[m * p + j];
                    v[m * p + i] = c * vmi - s * vmj;
                    v[m * p + j] = s * vmi + c * vmj;
                }
            }
    }

    LeastSquares out;
    out.coef.assign(p, 0.0);
    // Minimal-norm solution: zero the reciprocal of every eigenvalue at or
    // below the rank tolerance.
    for (std::size_t i = 0; i < p; ++i) {
        double d = a[i * p + i];
        if (d <= tol) {
            out.rank_deficient = true;
            continue;
        }
        double vb = 0.0;
        for (std::size_t m = 0; m < p; ++m) vb += v[m * p + i] * b[m];
        vb /= d;
        for (std::size_t m = 0; m < p; ++m) out.coef[m] += v[m * p + i] * vb;
    }
    return out;
}

KFoldResult kfold_eval(const Dataset& ds, const LearnerSpec& spec, int folds,
                       std::uint64_t seed) {
    if (folds < 2) throw ConfigError("kfold: folds must be >= 2");
    std::vector<std::int32_t> rows = resolve_rows(ds, spec.cfg);
    std::size_t r = rows.size();
    if (std::size_t(folds) > r) throw ConfigError("kfold: more folds than rows");
    std::size_t min_fold = r / std::size_t(folds);
    if (min_fold < std::max<std::size_t>(spec.cfg.n_support, 1))
        throw ConfigError("kfold: folds of " + std::to_string(min_fold) +
                          " rows fall below the support threshold; use fewer folds");

    Rng rng(seed);
    rng.shuffle(rows);

    KFoldResult out;
    int t = -1, out_attr = -1;
    if (spec.kind == LearnerKind::DList) {
        out_attr = ds.attribute_index(spec.column);
        if (out_attr < 0) throw ConfigError("unknown output attribute '" + spec.column + "'");
    } else {
        t = ds.target_index(spec.column);
        if (t < 0) throw ConfigError("unknown target '" + spec.column + "'");
    }

    for (int f = 0; f < folds; ++f) {
        std::size_t lo = r * std::size_t(f) / std::size_t(folds);
        std::size_t hi = r * std::size_t(f + 1) / std::size_t(folds);
        std::vector<std::int32_t> test(rows.begin() + long(lo), rows.begin() + long(hi));
        std::vector<std::int32_t> train;
        train.reserve(r - (hi - lo));
        train.insert(train.end(), rows.begin(), rows.begin() + long(lo));
        train.insert(train.end(), rows.begin() + long(hi), rows.end());
        std::sort(train.begin(), train.end());

        SearchConfig cfg = spec.cfg;
        cfg.in_play_rows = train;

        double loss = 0.0;
        switch (spec.kind) {
        case LearnerKind::DList: {
            DecisionList m = learn_dlist(ds, spec.column, cfg, spec.searcher);
            std::size_t wrong = 0;
            for (std::int32_t row : test)
                if (m.predict(ds, std::size_t(row)) !=
                    ds.columns[std::size_t(out_attr)][std::size_t(row)])
                    ++wrong;
            loss = double(wrong) / double(test.size());
            break;
        }
        case LearnerKind::RegList: {
            RegressionList m = learn_reglist(ds, spec.column, cfg, spec.searcher);
            double sse = 0.0;
            for (std::int32_t row : test) {
                double e = m.predict(ds, std::size_t(row)) -
                           ds.targets[std::size_t(t)][std::size_t(row)];
                sse += e * e;
            }
            loss = sse / double(test.size());
            break;
        }
        case LearnerKind::RadReg: {
            AdditiveRuleModel m = learn_radreg(ds, spec.column, cfg, spec.searcher,
                                               spec.max_terms);
            double sse = 0.0;
            for (std::int32_t row : test) {
                double e = m.predict(ds, std::size_t(row)) -
                           ds.targets[std::size_t(t)][std::size_t(row)];
                sse += e * e;
            }
            loss = sse / double(test.size());
            break;
        }
        }
        out.fold_losses.push_back(loss);
    }

    double sum = std::accumulate(out.fold_losses.begin(), out.fold_losses.end(), 0.0);
    out.mean = sum / double(folds);
    double ss = 0.0;
    for (double l : out.fold_losses) ss += (l - out.mean) * (l - out.mean);
    out.std_error = folds > 1 ? std::sqrt(ss / double(folds - 1) / double(folds)) : 0.0;
    return out;
}

} // namespace rad
