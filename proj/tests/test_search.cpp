#include <doctest.h>

#include "rad/errors.hpp"
#include "rad/rng.hpp"
#include "rad/search.hpp"

#include "testutil.hpp"

#include <algorithm>
#include <vector>

using namespace rad;

namespace {

SearchConfig mean_cfg(const Dataset& ds, int k, std::size_t support, std::size_t top) {
    SearchConfig cfg;
    cfg.k = k;
    cfg.n_support = support;
    cfg.score = ScoreKind::MeanTarget;
    cfg.spec = StatVecSpec::count_and_target(ds, "y");
    cfg.top_n = top;
    return cfg;
}

// Deceptive fixture: the best single literal is C=1 (mean 7.0) but none of
// its extensions improve on it, while A=1 & B=1 reaches 10.0. Greedy search
// stalls at 7.0; exhaustive search must find 10.0.
Dataset deceptive() {
    Dataset ds;
    ds.attribute_names = {"A", "B", "C"};
    ds.levels = {{"0", "1"}, {"0", "1"}, {"0", "1"}};
    ds.columns = {{1, 1, 0, 0, 1, 0, 0, 1},
                  {1, 1, 0, 1, 0, 0, 1, 0},
                  {0, 0, 1, 1, 1, 0, 0, 0}};
    ds.target_names = {"y"};
    ds.targets = {{10, 10, 7, 7, 7, 1, 0, 0}};
    ds.validate();
    return ds;
}

// Per-pass tweak counts of the lexicographic subset walk: pass q starts from
// a reset tree (q tweaks for the first subset), later subsets tweak from the
// first level where they differ from their predecessor.
std::vector<std::size_t> reference_tweaks(int m_eligible, int k) {
    std::vector<std::size_t> t(std::size_t(k), 0);
    for (int q = 1; q <= k; ++q) {
        std::vector<int> prev;
        auto combo = std::vector<int>(std::size_t(q));
        for (int i = 0; i < q; ++i) combo[std::size_t(i)] = i;
        while (true) {
            std::size_t cp = 0;
            while (cp < prev.size() && prev[cp] == combo[cp]) ++cp;
            for (std::size_t lvl = cp; lvl < combo.size(); ++lvl) ++t[lvl];
            prev = combo;
            int i = q - 1;
            while (i >= 0 && combo[std::size_t(i)] == m_eligible - q + i) --i;
            if (i < 0) break;
            ++combo[std::size_t(i)];
            for (int j = i + 1; j < q; ++j)
                combo[std::size_t(j)] = combo[std::size_t(j - 1)] + 1;
        }
    }
    return t;
}

std::size_t expected_rules_scored(const Dataset& ds, int k,
                                  const std::vector<int>& excluded) {
    std::vector<int> attrs;
    for (int m = 0; m < ds.n_attributes(); ++m)
        if (std::find(excluded.begin(), excluded.end(), m) == excluded.end())
            attrs.push_back(m);
    std::size_t total = 1; // the empty rule
    std::vector<std::size_t> idx;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (int(idx.size()) == k) return;
        for (std::size_t i = from; i < attrs.size(); ++i) {
            idx.push_back(i);
            std::size_t cells = 1;
            for (auto j : idx) cells *= std::size_t(ds.arity(attrs[j]));
            total += cells;
            self(self, i + 1);
            idx.pop_back();
        }
    };
    rec(rec, 0);
    return total;
}

} // namespace

TEST_CASE("searcher names round trip") {
    for (auto s : {Searcher::Rad, Searcher::NSN, Searcher::Naive, Searcher::Hill})
        CHECK(searcher_from_name(searcher_name(s)) == s);
    CHECK_THROWS_AS(searcher_from_name("grid"), ConfigError);
}

TEST_CASE("t1 best depth-2 rule is A=1 & B=1") {
    Dataset ds = testutil::t1();
    auto cfg = mean_cfg(ds, 2, 1, 1);
    for (auto s : {Searcher::Rad, Searcher::NSN, Searcher::Naive, Searcher::Hill}) {
        auto res = run_search(s, ds, cfg);
        REQUIRE(res.rules.size() == 1);
        CHECK(res.rules[0].rule == Rule{{{0, 1}, {1, 1}}});
        CHECK(res.rules[0].score == 7.5);
        CHECK(res.rules[0].stats == std::vector<double>{2.0, 15.0});
    }
}

TEST_CASE("t1 work accounting at k=2") {
    Dataset ds = testutil::t1();
    auto res = radsearch(ds, mean_cfg(ds, 2, 1, 1));
    const auto& st = res.stats;
    // 1 empty rule + 6 literal cells + 12 pair cells.
    CHECK(st.rules_scored == 19);
    // The q=0 table plus 3 single-attribute and 3 pair cubes.
    CHECK(st.cubes_evaluated == 7);
    CHECK(st.rowtrees_built == 6);
    CHECK(st.tweaks_per_level == std::vector<std::size_t>{5, 3});
    // Depth cap 1: root plus the three elided-complement children.
    CHECK(st.adtree_nodes == 4);
    CHECK(st.adtree_nodes_per_depth == std::vector<std::size_t>{1, 3});
    CHECK(st.lambda_hat == 0.5);
    CHECK(st.tables_pruned == 0);
}

TEST_CASE("support five leaves only the empty rule at depth one") {
    // Every literal matches exactly 4 of t1's rows, so the empty rule (8
    // rows, mean 4.5) is the only rule meeting a support of 5.
    Dataset ds = testutil::t1();
    auto cfg = mean_cfg(ds, 1, 5, 10);
    for (auto s : {Searcher::Rad, Searcher::NSN, Searcher::Naive}) {
        auto res = run_search(s, ds, cfg);
        REQUIRE(res.rules.size() == 1);
        CHECK(res.rules[0].rule.empty());
        CHECK(res.rules[0].score == 4.5);
    }
    // Greedy never proposes the empty rule; it reports nothing here.
    CHECK(hill_climb(ds, cfg).rules.empty());
}

TEST_CASE("top_n beyond the satisfying rules returns them all") {
    Dataset ds = testutil::t1();
    auto cfg = mean_cfg(ds, 1, 1, 100);
    auto res = radsearch(ds, cfg);
    CHECK(res.rules.size() == 7); // empty rule + 6 literals
    auto oracle = testutil::oracle_rank(ds, cfg);
    CHECK(testutil::same_rules(res.rules, oracle));
}

TEST_CASE("t1 depth-3 optimum is the all-ones cell") {
    Dataset ds = testutil::t1();
    auto cfg = mean_cfg(ds, 3, 1, 1);
    auto res = naive_search(ds, cfg);
    REQUIRE(res.rules.size() == 1);
    CHECK(res.rules[0].rule == Rule{{{0, 1}, {1, 1}, {2, 1}}});
    CHECK(res.rules[0].score == 8.0);
    CHECK(res.stats.cubes_evaluated == 0); // naive never forms cubes
    CHECK(testutil::same_rules(res.rules, radsearch(ds, cfg).rules));
}

TEST_CASE("all searchers agree with the scan oracle on random instances") {
    Rng rng(2024);
    int hill_leq = 0;
    for (int trial = 0; trial < 18; ++trial) {
        std::size_t n = 20 + rng.below(280);
        int m = 3 + int(rng.below(4));
        Dataset ds = testutil::random_dataset(rng, n, m, 4);

        SearchConfig cfg;
        cfg.k = 1 + int(rng.below(3));
        cfg.n_support = (trial % 2 == 0) ? 1 : n / 10;
        if (cfg.n_support < 1) cfg.n_support = 1;
        cfg.top_n = 1 + rng.below(10);

        switch (trial % 6) {
        case 0:
            cfg.score = ScoreKind::MeanTarget;
            cfg.spec = StatVecSpec::count_and_target(ds, "y");
            break;
        case 1:
            cfg.score = ScoreKind::NegVariance;
            cfg.spec = StatVecSpec::count_target_square(ds, "y");
            break;
        case 2:
            cfg.score = ScoreKind::Impact;
            cfg.spec = StatVecSpec::count_and_target(ds, "y");
            break;
        case 3:
            cfg.score = ScoreKind::BetweenGroupSS;
            cfg.spec = StatVecSpec::count_and_target(ds, "y");
            break;
        case 4:
            cfg.score = ScoreKind::NegEntropy;
            cfg.spec = StatVecSpec::one_hot(ds, ds.attribute_names[std::size_t(m - 1)]);
            cfg.excluded_attributes = {m - 1};
            break;
        default:
            cfg.score = ScoreKind::Strength;
            cfg.spec = StatVecSpec::one_hot(ds, ds.attribute_names[std::size_t(m - 1)]);
            cfg.excluded_attributes = {m - 1};
            break;
        }
        int eligible = m - int(cfg.excluded_attributes.size());
        if (cfg.k > eligible) cfg.k = eligible;

        auto oracle = testutil::oracle_rank(ds, cfg);
        auto rad = radsearch(ds, cfg);
        CHECK(testutil::same_rules(rad.rules, oracle));
        CHECK(testutil::same_rules(nsn_search(ds, cfg).rules, oracle));
        CHECK(testutil::same_rules(naive_search(ds, cfg).rules, oracle));

        // Work audits against closed forms.
        CHECK(rad.stats.rules_scored ==
              expected_rules_scored(ds, cfg.k, cfg.excluded_attributes));
        CHECK(rad.stats.tweaks_per_level == reference_tweaks(eligible, cfg.k));
        std::size_t combos = 0;
        {
            // sum over q of C(eligible, q), plus the q=0 table
            std::vector<std::vector<std::size_t>> c(
                std::size_t(eligible) + 1, std::vector<std::size_t>(std::size_t(cfg.k) + 1, 0));
            for (std::size_t i = 0; i <= std::size_t(eligible); ++i) {
                c[i][0] = 1;
                for (std::size_t j = 1; j <= std::size_t(cfg.k) && j <= i; ++j)
                    c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
            }
            for (int q = 1; q <= cfg.k; ++q) combos += c[std::size_t(eligible)][std::size_t(q)];
        }
        CHECK(rad.stats.rowtrees_built == combos);
        CHECK(rad.stats.cubes_evaluated == combos + 1);
        auto nsn = nsn_search(ds, cfg);
        CHECK(nsn.stats.cubes_evaluated == combos + 1);

        // Greedy never beats exhaustive.
        auto hill = hill_climb(ds, cfg);
        if (!oracle.empty() && !hill.rules.empty()) {
            CHECK(hill.rules[0].score <= oracle[0].score);
            ++hill_leq;
        }

        // Result invariants.
        for (std::size_t i = 0; i < rad.rules.size(); ++i) {
            if (i) CHECK(rad.rules[i - 1].score >= rad.rules[i].score);
            CHECK(rad.rules[i].score != kNegInf);
            CHECK(match_count(cfg.score, rad.rules[i].stats) >= double(cfg.n_support));
            auto direct = testutil::oracle_stats(ds, cfg.spec, rad.rules[i].rule);
            CHECK(rad.rules[i].stats == direct);
        }
    }
    CHECK(hill_leq > 0);
}

TEST_CASE("greedy stalls on the deceptive fixture") {
    Dataset ds = deceptive();
    auto cfg = mean_cfg(ds, 2, 1, 1);
    auto exact = radsearch(ds, cfg);
    REQUIRE(exact.rules.size() == 1);
    CHECK(exact.rules[0].rule == Rule{{{0, 1}, {1, 1}}});
    CHECK(exact.rules[0].score == 10.0);

    auto greedy = hill_climb(ds, cfg);
    REQUIRE(greedy.rules.size() == 1);
    CHECK(greedy.rules[0].rule == Rule{{{2, 1}}});
    CHECK(greedy.rules[0].score == 7.0);
    CHECK(greedy.rules[0].score < exact.rules[0].score);
}

TEST_CASE("greedy trace on t1 adopts A=1 then A=1 & B=1") {
    Dataset ds = testutil::t1();
    auto res = hill_climb(ds, mean_cfg(ds, 3, 1, 5));
    REQUIRE(res.rules.size() >= 2);
    // Adopted prefixes are all offered; the full extension wins.
    CHECK(res.rules[0].rule == Rule{{{0, 1}, {1, 1}, {2, 1}}});
    CHECK(res.rules[0].score == 8.0);
    bool has_a1 = false, has_a1b1 = false;
    for (const auto& r : res.rules) {
        if (r.rule == Rule{{{0, 1}}}) has_a1 = (r.score == 6.5);
        if (r.rule == Rule{{{0, 1}, {1, 1}}}) has_a1b1 = (r.score == 7.5);
    }
    CHECK(has_a1);
    CHECK(has_a1b1);
}

TEST_CASE("pruning never changes results and fires somewhere") {
    Rng rng(4242);
    std::size_t fired = 0;
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 50 + rng.below(200);
        int m = 4 + int(rng.below(3));
        Dataset ds = testutil::random_dataset(rng, n, m, 3);

        SearchConfig cfg;
        cfg.k = 2 + int(rng.below(2));
        cfg.top_n = 1 + rng.below(3);
        cfg.n_support = n / 6 + 1;
        if (trial % 2 == 0) {
            cfg.score = ScoreKind::Strength;
            cfg.spec = StatVecSpec::one_hot(ds, ds.attribute_names[std::size_t(m - 1)]);
            cfg.excluded_attributes = {m - 1};
        } else {
            cfg.score = ScoreKind::Impact;
            cfg.spec = StatVecSpec::count_and_target(ds, "y");
        }
        if (cfg.k > m - int(cfg.excluded_attributes.size()))
            cfg.k = m - int(cfg.excluded_attributes.size());

        auto plain = radsearch(ds, cfg);
        SearchConfig pruned_cfg = cfg;
        pruned_cfg.pruning = true;
        auto pruned = radsearch(ds, pruned_cfg);
        CHECK(testutil::same_rules(plain.rules, pruned.rules));
        CHECK(plain.stats.tables_pruned == 0);
        fired += pruned.stats.tables_pruned;
        // Pruned subsets still feed the AD-tree, so its size is unchanged.
        CHECK(plain.stats.adtree_nodes == pruned.stats.adtree_nodes);
    }
    CHECK(fired > 0);
}

TEST_CASE("prune_check requires a full collector and a strict shortfall") {
    Dataset ds = testutil::t1();
    SearchConfig cfg;
    cfg.score = ScoreKind::Strength;
    cfg.spec = StatVecSpec::one_hot(ds, "C");
    cfg.n_support = 5;
    cfg.pruning = true;
    ScoreContext ctx;
    ctx.n_support = 5;
    ctx.global = {4.0, 4.0};
    ctx.n_global = 8.0;

    std::vector<double> below_support = {2.0, 1.0}; // 3 rows: bound is -inf
    // Collector not yet full: never prune, whatever the bound says.
    CHECK_FALSE(prune_check(cfg, below_support, ctx, std::nullopt));
    // Full collector: -inf < 0.9 justifies the prune.
    CHECK(prune_check(cfg, below_support, ctx, 0.9));

    std::vector<double> rich = {4.0, 4.0}; // bound 1.0
    CHECK_FALSE(prune_check(cfg, rich, ctx, 0.9));
    // A bound that only ties the worst kept entry must not prune: an equal
    // scoring shorter rule could still displace it under the result order.
    CHECK_FALSE(prune_check(cfg, rich, ctx, 1.0));
}

TEST_CASE("topn keeps the best entries under the result order") {
    std::vector<double> s1 = {4.0, 4.0}, s2 = {3.0, 3.0};
    TopN top(2);
    CHECK_FALSE(top.full());
    CHECK_FALSE(top.worst_kept().has_value());
    top.offer(Rule{{{0, 1}}}, s1.data(), 2, 5.0);
    top.offer(Rule{{{1, 1}}}, s2.data(), 2, 4.0);
    CHECK(top.full());
    CHECK(top.worst_kept() == 4.0);
    top.offer(Rule{{{2, 1}}}, s2.data(), 2, 3.0); // below the worst: ignored
    top.offer(Rule{{{2, 0}}}, s2.data(), 2, 4.5); // displaces the 4.0 entry
    auto out = top.take_sorted();
    REQUIRE(out.size() == 2);
    CHECK(out[0].score == 5.0);
    CHECK(out[1].score == 4.5);

    TopN never(2);
    never.offer(Rule{}, s1.data(), 2, kNegInf);
    CHECK(never.take_sorted().empty());

    // Equal scores: the shorter rule ranks higher and displaces.
    TopN tie(1);
    tie.offer(Rule{{{0, 1}}}, s1.data(), 2, 5.0);
    tie.offer(Rule{}, s1.data(), 2, 5.0);
    auto t = tie.take_sorted();
    REQUIRE(t.size() == 1);
    CHECK(t[0].rule.empty());

    // Merge keeps the global best across workers.
    TopN a(2), b(2);
    a.offer(Rule{{{0, 0}}}, s1.data(), 2, 5.0);
    a.offer(Rule{{{0, 1}}}, s1.data(), 2, 1.0);
    b.offer(Rule{{{1, 0}}}, s2.data(), 2, 3.0);
    b.offer(Rule{{{1, 1}}}, s2.data(), 2, 2.0);
    a.merge(std::move(b));
    auto merged = a.take_sorted();
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].score == 5.0);
    CHECK(merged[1].score == 3.0);
}

TEST_CASE("worker count never changes results") {
    Rng rng(31337);
    for (int trial = 0; trial < 6; ++trial) {
        Dataset ds = testutil::random_dataset(rng, 40 + rng.below(160), 5, 3);
        auto cfg = mean_cfg(ds, 3, 2, 5);
        auto solo = radsearch(ds, cfg);
        for (int threads : {2, 3}) {
            SearchConfig c2 = cfg;
            c2.threads = threads;
            auto multi = radsearch(ds, c2);
            CHECK(testutil::same_rules(solo.rules, multi.rules));
            CHECK(multi.stats.rules_scored == solo.stats.rules_scored);
        }
    }
}

TEST_CASE("in-play rows restrict the search to a subset") {
    Dataset ds = testutil::t1();
    auto cfg = mean_cfg(ds, 2, 1, 10);
    cfg.in_play_rows = std::vector<std::int32_t>{0, 2, 4, 6}; // C=0 rows
    auto res = radsearch(ds, cfg);
    auto oracle = testutil::oracle_rank(ds, cfg);
    CHECK(testutil::same_rules(res.rules, oracle));
    // Stats are computed over the in-play rows only.
    for (const auto& r : res.rules)
        CHECK(r.stats == testutil::oracle_stats(ds, cfg.spec, r.rule, *cfg.in_play_rows));

    SearchConfig bad = cfg;
    bad.in_play_rows = std::vector<std::int32_t>{4, 2}; // unsorted
    CHECK_THROWS_AS(radsearch(ds, bad), ContractViolation);
    SearchConfig none = cfg;
    none.in_play_rows = std::vector<std::int32_t>{};
    CHECK_THROWS_AS(radsearch(ds, none), ConfigError);
}

TEST_CASE("configuration errors are loud") {
    Dataset ds = testutil::t1();
    auto good = mean_cfg(ds, 2, 1, 1);

    SearchConfig k0 = good;
    k0.k = 0;
    CHECK_THROWS_AS(radsearch(ds, k0), ConfigError);

    SearchConfig deep = good;
    deep.k = 4; // only 3 attributes
    CHECK_THROWS_AS(radsearch(ds, deep), ConfigError);

    SearchConfig excl = good;
    excl.k = 3;
    excl.excluded_attributes = {0}; // leaves 2 eligible
    CHECK_THROWS_AS(radsearch(ds, excl), ConfigError);

    SearchConfig sup = good;
    sup.n_support = 9;
    CHECK_THROWS_AS(radsearch(ds, sup), ConfigError);

    SearchConfig top0 = good;
    top0.top_n = 0;
    CHECK_THROWS_AS(radsearch(ds, top0), ConfigError);

    SearchConfig unset = good;
    unset.spec = StatVecSpec{};
    CHECK_THROWS_AS(radsearch(ds, unset), ConfigError);

    SearchConfig prune_mean = good;
    prune_mean.pruning = true; // mean has no optimistic bound
    CHECK_THROWS_AS(radsearch(ds, prune_mean), ConfigError);

    SearchConfig badx = good;
    badx.excluded_attributes = {7};
    CHECK_THROWS_AS(radsearch(ds, badx), ConfigError);

    SearchConfig threads0 = good;
    threads0.threads = 0;
    CHECK_THROWS_AS(radsearch(ds, threads0), ConfigError);
}

TEST_CASE("zero-row datasets load but cannot satisfy support") {
    auto path = testutil::write_temp_csv("searchempty.csv", "A,B,y\n");
    Dataset ds = load_csv(path, Schema::parse("A,B cat; y num"));
    CHECK(ds.n_rows() == 0);
    SearchConfig cfg;
    cfg.k = 1;
    cfg.score = ScoreKind::MeanTarget;
    cfg.spec = StatVecSpec::count_and_target(ds, "y");
    CHECK_THROWS_AS(radsearch(ds, cfg), ConfigError);
}

TEST_CASE("tiny memory budgets fail loudly") {
    Rng rng(5);
    Dataset ds = testutil::random_dataset(rng, 100, 5, 4);
    auto cfg = mean_cfg(ds, 3, 1, 1);
    cfg.memory_budget_bytes = 400;
    CHECK_THROWS_AS(radsearch(ds, cfg), RuntimeError);
}

TEST_CASE("naive cost estimate counts cells times rows") {
    Dataset ds = testutil::t1();
    CHECK(naive_cost_estimate(ds, mean_cfg(ds, 2, 1, 1)) == 19.0 * 8.0);
    CHECK(naive_cost_estimate(ds, mean_cfg(ds, 3, 1, 1)) == 27.0 * 8.0);
    auto excl = mean_cfg(ds, 2, 1, 1);
    excl.excluded_attributes = {2};
    CHECK(naive_cost_estimate(ds, excl) == (1.0 + 4.0 + 4.0) * 8.0);
}

TEST_CASE("deeper searches and looser support never lower the best score") {
    Rng rng(808);
    for (int trial = 0; trial < 5; ++trial) {
        Dataset ds = testutil::random_dataset(rng, 60 + rng.below(100), 4, 3);
        double prev = kNegInf;
        for (int k = 1; k <= 3; ++k) {
            auto res = radsearch(ds, mean_cfg(ds, k, 1, 1));
            REQUIRE(!res.rules.empty());
            CHECK(res.rules[0].score >= prev);
            prev = res.rules[0].score;
        }
        auto loose = radsearch(ds, mean_cfg(ds, 2, 1, 1));
        auto tight = radsearch(ds, mean_cfg(ds, 2, 10, 1));
        if (!tight.rules.empty()) CHECK(loose.rules[0].score >= tight.rules[0].score);
    }
}
