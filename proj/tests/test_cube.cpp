#include <doctest.h>

#include "rad/adtree.hpp"
#include "rad/cube.hpp"
#include "rad/rng.hpp"
#include "rad/rowtree.hpp"

#include "testutil.hpp"

#include <algorithm>
#include <vector>

using namespace rad;

namespace {

std::vector<std::int32_t> iota_rows(std::size_t n) {
    std::vector<std::int32_t> rows(n);
    for (std::size_t r = 0; r < n; ++r) rows[r] = std::int32_t(r);
    return rows;
}

std::vector<std::vector<int>> subsets_upto(int m, int max_size) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int from) -> void {
        if (!cur.empty()) out.push_back(cur);
        if (int(cur.size()) == max_size) return;
        for (int a = from; a < m; ++a) {
            cur.push_back(a);
            self(self, a + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

ADTree adtree_for(const Dataset& ds, const StatMatrix& mat, int cap) {
    std::vector<double> root(mat.dim, 0.0);
    for (std::size_t r = 0; r < mat.rows; ++r)
        for (std::size_t j = 0; j < mat.dim; ++j) root[j] += mat.row(r)[j];
    ADTree ad(ds, mat.dim, cap, root);
    RowTree rt(ds, mat, iota_rows(mat.rows));
    for (const auto& attrs : subsets_upto(ds.n_attributes(), cap)) {
        rt.retarget(attrs);
        ad.insert(rt);
    }
    return ad;
}

} // namespace

TEST_CASE("count cube over t1 (A,B)") {
    Dataset ds = testutil::t1();
    auto spec = StatVecSpec::count_only(ds);
    DataCube c = scan_cube(ds, spec, {0, 1}, iota_rows(8));
    REQUIRE(c.n_cells() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.cell(i)[0] == 2.0);
    // Mixed radix, last attribute fastest.
    CHECK(c.values_of_cell(0) == std::vector<std::int32_t>{0, 0});
    CHECK(c.values_of_cell(1) == std::vector<std::int32_t>{0, 1});
    CHECK(c.values_of_cell(2) == std::vector<std::int32_t>{1, 0});
    CHECK(c.values_of_cell(3) == std::vector<std::int32_t>{1, 1});
}

TEST_CASE("cell order puts the last attribute fastest") {
    Dataset ds = testutil::t1();
    auto spec = StatVecSpec::count_and_target(ds, "y");
    DataCube c = scan_cube(ds, spec, {1, 2}, iota_rows(8));
    REQUIRE(c.n_cells() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        auto vals = c.values_of_cell(i);
        Rule r{{{1, vals[0]}, {2, vals[1]}}};
        auto want = testutil::oracle_stats(ds, spec, r);
        CHECK(c.cell(i)[0] == want[0]);
        CHECK(c.cell(i)[1] == want[1]);
    }
}

TEST_CASE("empty attribute list gives one global cell") {
    Dataset ds = testutil::t1();
    auto spec = StatVecSpec::count_and_target(ds, "y");
    DataCube c = scan_cube(ds, spec, {}, iota_rows(8));
    REQUIRE(c.n_cells() == 1);
    CHECK(c.cell(0)[0] == 8.0);
    CHECK(c.cell(0)[1] == 36.0);
}

TEST_CASE("empty row set gives all-zero cells") {
    Dataset ds = testutil::t1();
    auto spec = StatVecSpec::count_and_target(ds, "y");
    DataCube c = scan_cube(ds, spec, {0, 2}, {});
    REQUIRE(c.n_cells() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(c.cell(i)[j] == 0.0);
}

TEST_CASE("make_cube allocates zeroed cells") {
    Dataset ds = testutil::t1();
    DataCube c = make_cube(ds, 3, {0, 1, 2});
    CHECK(c.n_cells() == 8);
    CHECK(c.attrs == std::vector<int>{0, 1, 2});
    CHECK(c.arities == std::vector<std::int32_t>{2, 2, 2});
    for (double v : c.cells) CHECK(v == 0.0);
}

TEST_CASE("scan_rule examples on t1") {
    Dataset ds = testutil::t1();
    auto spec = StatVecSpec::count_and_target(ds, "y");
    auto rows = iota_rows(8);
    CHECK(scan_rule(ds, spec, Rule{}, rows) == std::vector<double>{8.0, 36.0});
    CHECK(scan_rule(ds, spec, Rule{{{0, 1}, {1, 1}}}, rows) == std::vector<double>{2.0, 15.0});

    StatMatrix mat = materialize(ds, spec);
    CHECK(scan_rule(ds, mat, Rule{{{0, 1}, {1, 1}}}, rows) == std::vector<double>{2.0, 15.0});
}

TEST_CASE("a literal on a value no row takes matches nothing") {
    Dataset ds;
    ds.attribute_names = {"A", "B"};
    ds.levels = {{"0", "1"}, {"0", "1"}};
    ds.columns = {{0, 0, 0}, {0, 1, 0}}; // A never takes value 1
    ds.target_names = {"y"};
    ds.targets = {{1.0, 2.0, 3.0}};
    ds.validate();
    auto spec = StatVecSpec::count_and_target(ds, "y");
    auto s = scan_rule(ds, spec, Rule{{{0, 1}}}, iota_rows(3));
    CHECK(s == std::vector<double>{0.0, 0.0});
}

TEST_CASE("build_dc equals scan_cube on t1's full cube") {
    Dataset ds = testutil::t1();
    auto spec = StatVecSpec::count_and_target(ds, "y");
    StatMatrix mat = materialize(ds, spec);
    ADTree ad = adtree_for(ds, mat, 2); // the cache a k=3 pass would hold
    RowTree rt = build_rowtree(ds, mat, {0, 1, 2}, iota_rows(8));

    DataCube got = build_dc(rt, ad);
    DataCube want = scan_cube(ds, spec, {0, 1, 2}, iota_rows(8));
    REQUIRE(got.n_cells() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(got.cell(i)[j] == want.cell(i)[j]);
}

TEST_CASE("build_dc equals scan_cube on random data") {
    Rng rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 20 + rng.below(280);
        int m = 3 + int(rng.below(4));
        Dataset ds = testutil::random_dataset(rng, n, m, 4);
        auto spec = StatVecSpec::count_target_square(ds, "y");
        StatMatrix mat = materialize(ds, spec);
        int k = 2 + int(rng.below(3));
        if (k > m) k = m;
        ADTree ad = adtree_for(ds, mat, k - 1);
        RowTree rt(ds, mat, iota_rows(n));

        // Every size-k subset, exactly as a pass enumerates them.
        std::vector<std::vector<int>> subs;
        for (const auto& s : subsets_upto(m, k))
            if (int(s.size()) == k) subs.push_back(s);
        for (const auto& attrs : subs) {
            rt.retarget(attrs);
            DataCube got = build_dc(rt, ad);
            DataCube want = scan_cube(ds, spec, attrs, iota_rows(n));
            REQUIRE(got.n_cells() == want.n_cells());
            // Dyadic targets keep every partial sum exact, so BuildDC's
            // subtraction path must agree bitwise with the direct scan.
            for (std::size_t i = 0; i < got.n_cells(); ++i)
                for (std::size_t j = 0; j < got.dim; ++j)
                    CHECK(got.cell(i)[j] == want.cell(i)[j]);
        }
    }
}

TEST_CASE("marginalizing a cube drops an attribute") {
    Rng rng(23);
    Dataset ds = testutil::random_dataset(rng, 100, 4, 3);
    auto spec = StatVecSpec::count_and_target(ds, "y");
    DataCube full = scan_cube(ds, spec, {0, 2, 3}, iota_rows(100));
    DataCube margin = scan_cube(ds, spec, {0, 2}, iota_rows(100));
    // Summing over the last (fastest) attribute's values collapses blocks.
    std::size_t a3 = std::size_t(ds.arity(3));
    REQUIRE(full.n_cells() == margin.n_cells() * a3);
    for (std::size_t i = 0; i < margin.n_cells(); ++i) {
        std::vector<double> acc(2, 0.0);
        for (std::size_t v = 0; v < a3; ++v)
            for (std::size_t j = 0; j < 2; ++j) acc[j] += full.cell(i * a3 + v)[j];
        for (std::size_t j = 0; j < 2; ++j) CHECK(acc[j] == margin.cell(i)[j]);
    }
}

TEST_CASE("global cell equals the sum of any cube's cells") {
    Rng rng(29);
    Dataset ds = testutil::random_dataset(rng, 64, 3, 4);
    auto spec = StatVecSpec::count_and_target(ds, "y");
    auto global = scan_rule(ds, spec, Rule{}, iota_rows(64));
    for (const auto& attrs : subsets_upto(3, 2)) {
        DataCube c = scan_cube(ds, spec, attrs, iota_rows(64));
        std::vector<double> acc(2, 0.0);
        for (std::size_t i = 0; i < c.n_cells(); ++i)
            for (std::size_t j = 0; j < 2; ++j) acc[j] += c.cell(i)[j];
        for (std::size_t j = 0; j < 2; ++j) CHECK(acc[j] == global[j]);
    }
}
