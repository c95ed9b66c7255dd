#include <doctest.h>

#include "rad/errors.hpp"
#include "rad/learners.hpp"
#include "rad/rng.hpp"
#include "rad/synth.hpp"

#include "testutil.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace rad;

namespace {

SearchConfig bare_cfg(int k) {
    SearchConfig cfg;
    cfg.k = k;
    cfg.n_support = 1;
    return cfg;
}

// Class = A xor B over four balanced blocks, plus an unrelated attribute.
Dataset xor_dataset(std::size_t repeats, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.attribute_names = {"A", "B", "N", "cls"};
    ds.levels = {{"0", "1"}, {"0", "1"}, {"0", "1"}, {"0", "1"}};
    ds.columns.resize(4);
    for (std::size_t r = 0; r < repeats; ++r) {
        for (std::int32_t a = 0; a < 2; ++a)
            for (std::int32_t b = 0; b < 2; ++b) {
                ds.columns[0].push_back(a);
                ds.columns[1].push_back(b);
                ds.columns[2].push_back(std::int32_t(rng.below(2)));
                ds.columns[3].push_back(a ^ b);
            }
    }
    ds.validate();
    return ds;
}

double mse_of(const Dataset& ds, const RegressionList& model) {
    const auto& y = ds.targets[std::size_t(ds.target_index(model.target))];
    double acc = 0.0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        double e = y[r] - model.predict(ds, r);
        acc += e * e;
    }
    return acc / double(ds.n_rows());
}

double mse_of(const Dataset& ds, const AdditiveRuleModel& model) {
    const auto& y = ds.targets[std::size_t(ds.target_index(model.target))];
    double acc = 0.0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        double e = y[r] - model.predict(ds, r);
        acc += e * e;
    }
    return acc / double(ds.n_rows());
}

} // namespace

TEST_CASE("least squares basics") {
    SUBCASE("intercept only recovers the mean") {
        auto fit = least_squares_fit({{1, 1, 1, 1}}, {1, 2, 3, 6});
        REQUIRE(fit.coef.size() == 1);
        CHECK(fit.coef[0] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK_FALSE(fit.rank_deficient);
    }
    SUBCASE("an indicator splits into group means") {
        auto fit = least_squares_fit({{1, 1, 1, 1}, {0, 0, 1, 1}}, {1, 1, 3, 3});
        REQUIRE(fit.coef.size() == 2);
        CHECK(fit.coef[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.coef[1] == doctest::Approx(2.0).epsilon(1e-12)); // group mean difference
        CHECK_FALSE(fit.rank_deficient);
    }
    SUBCASE("a duplicated column is flagged") {
        auto fit = least_squares_fit({{1, 1, 1, 1}, {0, 0, 1, 1}, {0, 0, 1, 1}}, {1, 1, 3, 3});
        CHECK(fit.rank_deficient);
        // The minimal-norm solution still predicts the group means.
        for (std::size_t r = 0; r < 4; ++r) {
            double pred = fit.coef[0] + (r >= 2 ? fit.coef[1] + fit.coef[2] : 0.0);
            CHECK(pred == doctest::Approx(r >= 2 ? 3.0 : 1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("reglist on t1 peels the mean-sorted cells") {
    Dataset ds = testutil::t1();
    auto cfg = bare_cfg(2);
    cfg.n_support = 2;
    auto model = learn_reglist(ds, "y", cfg, Searcher::Rad);
    // Best rule A=1 & B=1 (mean 7.5) is removed, then A=1 over the rest
    // (5.5), then B=1 (3.5); the final two rows set the default 1.5.
    REQUIRE(model.entries.size() == 3);
    CHECK(model.entries[0].rule == Rule{{{0, 1}, {1, 1}}});
    CHECK(model.entries[0].value == 7.5);
    CHECK(model.entries[1].rule == Rule{{{0, 1}}});
    CHECK(model.entries[1].value == 5.5);
    CHECK(model.entries[2].rule == Rule{{{1, 1}}});
    CHECK(model.entries[2].value == 3.5);
    CHECK(model.default_value == 1.5);
    CHECK(model.target == "y");

    // Replay: predictions follow the first matching entry.
    CHECK(model.predict(ds, 7) == 7.5);
    CHECK(model.predict(ds, 4) == 5.5);
    CHECK(model.predict(ds, 2) == 3.5);
    CHECK(model.predict(ds, 0) == 1.5);

    auto text = model.to_text(ds);
    CHECK(text.find("if A=1 ∧ B=1 then predict y=7.50") != std::string::npos);
    CHECK(text.find("else predict y=1.50") != std::string::npos);

    // Each pair straddles its cell mean by 0.5, so the training MSE is 0.25.
    CHECK(mse_of(ds, model) == 0.25);
}

TEST_CASE("reglist entries describe disjoint row sets with true means") {
    Rng rng(606);
    Dataset ds = testutil::random_dataset(rng, 120, 4, 3);
    auto cfg = bare_cfg(2);
    cfg.n_support = 5;
    auto model = learn_reglist(ds, "y", cfg, Searcher::Rad);

    std::set<std::int32_t> claimed;
    std::vector<std::int32_t> remaining;
    for (std::int32_t r = 0; r < 120; ++r) remaining.push_back(r);
    for (const auto& e : model.entries) {
        // Rows matched among the still-remaining rows.
        std::vector<std::int32_t> matched, rest;
        for (auto r : remaining)
            (e.rule.matches(ds, std::size_t(r)) ? matched : rest).push_back(r);
        REQUIRE(matched.size() >= 5); // support respected on the remainder
        for (auto r : matched) CHECK(claimed.insert(r).second); // disjoint
        // Entry value is the exact mean of its matched rows.
        double sum = 0.0;
        for (auto r : matched) sum += ds.targets[0][std::size_t(r)];
        CHECK(e.value == sum / double(matched.size()));
        // The greedy choice never reads below the remainder's own mean.
        double rem_sum = 0.0;
        for (auto r : remaining) rem_sum += ds.targets[0][std::size_t(r)];
        CHECK(e.value >= rem_sum / double(remaining.size()));
        remaining = rest;
    }
    if (!remaining.empty()) {
        double sum = 0.0;
        for (auto r : remaining) sum += ds.targets[0][std::size_t(r)];
        CHECK(model.default_value == sum / double(remaining.size()));
    }
}

TEST_CASE("reglist on a constant target is a single default") {
    Dataset ds = testutil::t1();
    Dataset flat = ds.with_target("y", std::vector<double>(8, 2.5));
    auto model = learn_reglist(flat, "y", bare_cfg(2), Searcher::Rad);
    CHECK(model.entries.empty());
    CHECK(model.default_value == 2.5);
    for (std::size_t r = 0; r < 8; ++r) CHECK(model.predict(flat, r) == 2.5);
    CHECK(model.to_text(flat).find("always predict y=2.50") != std::string::npos);
}

TEST_CASE("dlist separates a linearly learnable class") {
    Rng rng(17);
    Dataset ds = testutil::random_dataset(rng, 100, 3, 2);
    // Make the first attribute the class of interest: cls = A.
    Dataset labeled = ds;
    labeled.attribute_names.push_back("cls");
    labeled.levels.push_back({"0", "1"});
    labeled.columns.push_back(ds.columns[0]);
    labeled.validate();

    auto model = learn_dlist(labeled, "cls", bare_cfg(1), Searcher::Rad);
    CHECK(model.output_attribute == 3);
    // A=0 is pure, ties A=1, and wins on literal order.
    REQUIRE(model.entries.size() == 1);
    CHECK(model.entries[0].rule == Rule{{{0, 0}}});
    CHECK(model.entries[0].label == 0);
    CHECK(model.default_label == 1);
    for (std::size_t r = 0; r < 100; ++r)
        CHECK(model.predict(labeled, r) == labeled.columns[3][r]);
    auto text = model.to_text(labeled);
    CHECK(text.find("if A=0 then cls=0") != std::string::npos);
    CHECK(text.find("else cls=1") != std::string::npos);
}

TEST_CASE("dlist solves xor with depth-2 rules") {
    Dataset ds = xor_dataset(25, 9); // 100 rows
    auto model = learn_dlist(ds, "cls", bare_cfg(2), Searcher::Rad);
    // Every entry is a pure depth-2 rule; training accuracy is perfect.
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        CHECK(model.predict(ds, r) == ds.columns[3][r]);
    for (const auto& e : model.entries) CHECK(e.rule.size() <= 2);
    CHECK(!model.entries.empty());

    // Greedy search cannot see past the zero-gain single literals, so the
    // exhaustive searcher is what makes this work; with hill climbing the
    // chain may fail to reach perfect accuracy (xor has no greedy path), but
    // the learner must still terminate and predict something.
    auto greedy = learn_dlist(ds, "cls", bare_cfg(2), Searcher::Hill);
    CHECK(greedy.entries.size() <= ds.n_rows());
}

TEST_CASE("dlist entry labels are distribution argmaxes over matched rows") {
    Dataset ds = xor_dataset(10, 4);
    auto model = learn_dlist(ds, "cls", bare_cfg(2), Searcher::Rad);
    std::vector<std::int32_t> remaining;
    for (std::int32_t r = 0; r < std::int32_t(ds.n_rows()); ++r) remaining.push_back(r);
    for (const auto& e : model.entries) {
        std::vector<std::int32_t> matched, rest;
        for (auto r : remaining)
            (e.rule.matches(ds, std::size_t(r)) ? matched : rest).push_back(r);
        REQUIRE(!matched.empty());
        std::vector<double> dist(2, 0.0);
        for (auto r : matched) dist[std::size_t(ds.columns[3][std::size_t(r)])] += 1.0;
        CHECK(e.distribution == dist);
        CHECK(dist[std::size_t(e.label)] == *std::max_element(dist.begin(), dist.end()));
        remaining = rest;
    }
}

TEST_CASE("dlist on an output with a single level is a bare default") {
    Dataset ds;
    ds.attribute_names = {"A", "K"};
    ds.levels = {{"0", "1"}, {"only"}};
    ds.columns = {{0, 1, 0, 1}, {0, 0, 0, 0}};
    ds.validate();
    auto model = learn_dlist(ds, "K", bare_cfg(1), Searcher::Rad);
    CHECK(model.entries.empty());
    CHECK(model.default_label == 0);
    CHECK(model.to_text(ds).find("always K=only") != std::string::npos);
}

TEST_CASE("support threshold stops the cover loop early") {
    Dataset ds = testutil::t1();
    auto cfg = bare_cfg(2);
    cfg.n_support = 9; // more than the dataset has
    auto model = learn_reglist(ds, "y", cfg, Searcher::Rad);
    CHECK(model.entries.empty());
    CHECK(model.default_value == 4.5); // global mean fallback
    auto dmodel = learn_dlist(ds, "C", cfg, Searcher::Rad);
    CHECK(dmodel.entries.empty());
    CHECK(dmodel.default_label == 0);
}

TEST_CASE("radreg recovers an exact two-rule additive model") {
    Dataset ds = testutil::t1();
    // y = 1 + 4*I(A=1) + 2*I(B=1) + I(C=1) holds exactly on t1.
    auto model = learn_radreg(ds, "y", bare_cfg(2), Searcher::Rad, 3);
    CHECK(model.target == "y");
    CHECK_FALSE(model.stopped_on_collinearity);
    REQUIRE(model.terms.size() == 3);
    // Complement literals explain identical variance; the tie goes to value
    // 0, so coefficients come out negated relative to the generating form.
    double sse = 0.0;
    for (std::size_t r = 0; r < 8; ++r) {
        double e = ds.targets[0][r] - model.predict(ds, r);
        sse += e * e;
    }
    CHECK(sse <= 1e-18);
}

TEST_CASE("radreg single-step on a one-rule target") {
    // y = 3 + 5*I(A=1 & B=0): a two-literal rule has no conjunctive
    // complement, so the recovered rule is literally the generator.
    Rng rng(2718);
    Dataset ds = testutil::random_dataset(rng, 400, 5, 2);
    std::vector<double> y;
    Rule gen{{{0, 1}, {1, 0}}};
    for (std::size_t r = 0; r < 400; ++r)
        y.push_back(3.0 + (gen.matches(ds, r) ? 5.0 : 0.0));
    Dataset built = ds.with_target("y", y);

    auto model = learn_radreg(built, "y", bare_cfg(2), Searcher::Rad, 1);
    REQUIRE(model.terms.size() == 1);
    CHECK(model.terms[0].rule == gen);
    CHECK(model.terms[0].coefficient == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(model.intercept == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(mse_of(built, model) <= 1e-18);
}

TEST_CASE("radreg stops when residuals carry no structure") {
    Dataset ds = testutil::t1();
    Dataset flat = ds.with_target("y", std::vector<double>(8, 1.25));
    auto model = learn_radreg(flat, "y", bare_cfg(2), Searcher::Rad, 4);
    CHECK(model.terms.empty());
    CHECK(model.intercept == 1.25);
    CHECK(model.to_text(flat).find("begin with y = 1.25") != std::string::npos);
}

TEST_CASE("radreg training error never increases with more terms") {
    Rng rng(99);
    Dataset ds = testutil::random_dataset(rng, 250, 5, 3);
    double prev = -1.0;
    for (int terms = 1; terms <= 4; ++terms) {
        auto model = learn_radreg(ds, "y", bare_cfg(2), Searcher::Rad, terms);
        double mse = mse_of(ds, model);
        if (prev >= 0.0) CHECK(mse <= prev + 1e-12);
        prev = mse;
    }
}

TEST_CASE("radreg flags collinearity instead of looping") {
    // Two attributes that are copies of each other: once I(A=1) is a term,
    // the residual search proposes I(B=1), whose column duplicates it.
    Dataset ds;
    ds.attribute_names = {"A", "B"};
    ds.levels = {{"0", "1"}, {"0", "1"}};
    ds.columns = {{0, 0, 1, 1, 0, 1}, {0, 0, 1, 1, 0, 1}};
    ds.target_names = {"y"};
    ds.targets = {{1.0, 1.0, 7.0, 7.0, 1.0, 7.0}};
    ds.validate();
    auto model = learn_radreg(ds, "y", bare_cfg(1), Searcher::Rad, 4);
    CHECK(model.stopped_on_collinearity);
    // The model it kept still fits the data it could explain.
    CHECK(mse_of(ds, model) <= 1e-18);
    CHECK(model.to_text(ds).find("y") != std::string::npos);
}

TEST_CASE("learner searcher must be exhaustive or greedy") {
    Dataset ds = testutil::t1();
    CHECK_THROWS_AS(learn_reglist(ds, "y", bare_cfg(2), Searcher::Naive), ConfigError);
    CHECK_THROWS_AS(learn_dlist(ds, "C", bare_cfg(1), Searcher::NSN), ConfigError);
    CHECK_THROWS_AS(learn_radreg(ds, "y", bare_cfg(2), Searcher::Rad, 0), ConfigError);
    CHECK_THROWS_AS(learn_reglist(ds, "zz", bare_cfg(2), Searcher::Rad), ConfigError);
    CHECK_THROWS_AS(learn_dlist(ds, "y", bare_cfg(1), Searcher::Rad), ConfigError);
}

TEST_CASE("greedy learner iterations never beat exhaustive ones") {
    Rng rng(55);
    Dataset ds = testutil::random_dataset(rng, 150, 4, 3);
    auto cfg = bare_cfg(2);
    cfg.n_support = 8;
    auto exact = learn_reglist(ds, "y", cfg, Searcher::Rad);
    auto greedy = learn_reglist(ds, "y", cfg, Searcher::Hill);
    REQUIRE(!exact.entries.empty());
    if (!greedy.entries.empty()) {
        // Both first iterations see identical remaining rows; the greedy rule
        // cannot have the higher matched mean.
        CHECK(greedy.entries[0].value <= exact.entries[0].value);
    }
}

TEST_CASE("kfold is deterministic and validates its arguments") {
    Dataset ds = xor_dataset(20, 3); // 80 rows
    LearnerSpec spec;
    spec.kind = LearnerKind::DList;
    spec.column = "cls";
    spec.cfg = bare_cfg(2);
    spec.searcher = Searcher::Rad;

    auto a = kfold_eval(ds, spec, 5, 42);
    auto b = kfold_eval(ds, spec, 5, 42);
    CHECK(a.fold_losses == b.fold_losses);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    REQUIRE(a.fold_losses.size() == 5);
    // xor is perfectly learnable, and every training fold still contains all
    // four (A,B) blocks, so held-out error is zero.
    for (double l : a.fold_losses) CHECK(l == 0.0);

    CHECK_THROWS_AS(kfold_eval(ds, spec, 1, 42), ConfigError);
    CHECK_THROWS_AS(kfold_eval(ds, spec, 81, 42), ConfigError);
}

TEST_CASE("kfold error of a majority-only learner matches the class split") {
    // All rule attributes are constant, so the dlist always degenerates to
    // the training fold's majority class; the held-out misclassification
    // rate then estimates the minority fraction.
    Rng rng(1234);
    std::size_t n = 500;
    Dataset ds;
    ds.attribute_names = {"K1", "K2", "cls"};
    ds.levels = {{"x"}, {"x"}, {"0", "1"}};
    ds.columns.resize(3);
    std::size_t minority = 0;
    for (std::size_t r = 0; r < n; ++r) {
        ds.columns[0].push_back(0);
        ds.columns[1].push_back(0);
        std::int32_t c = rng.bernoulli(0.3) ? 1 : 0;
        minority += std::size_t(c);
        ds.columns[2].push_back(c);
    }
    ds.validate();

    LearnerSpec spec;
    spec.kind = LearnerKind::DList;
    spec.column = "cls";
    spec.cfg = bare_cfg(1);
    spec.searcher = Searcher::Rad;
    auto res = kfold_eval(ds, spec, 5, 7);
    double expect = double(minority) / double(n);
    double tol = 3.0 * std::max(res.std_error, 0.005);
    CHECK(std::abs(res.mean - expect) <= tol);
}

TEST_CASE("kfold mse of reglist and radreg on t1 leave-one-out") {
    Dataset ds = testutil::t1();
    LearnerSpec spec;
    spec.kind = LearnerKind::RegList;
    spec.column = "y";
    spec.cfg = bare_cfg(2);
    auto res = kfold_eval(ds, spec, 8, 1); // leave-one-out runs to completion
    CHECK(res.fold_losses.size() == 8);
    CHECK(res.mean >= 0.0);

    spec.kind = LearnerKind::RadReg;
    spec.max_terms = 2;
    auto rr = kfold_eval(ds, spec, 4, 1);
    CHECK(rr.fold_losses.size() == 4);
    for (double l : rr.fold_losses) CHECK(l >= 0.0);
    CHECK(rr.std_error >= 0.0);
}
