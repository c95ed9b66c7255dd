#include "rad/search.hpp"
#include "rad/adtree.hpp"
#include "rad/cube.hpp"
#include "rad/errors.hpp"
#include "rad/kernels.hpp"
#include "rad/rowtree.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <thread>

namespace rad {

Searcher searcher_from_name(const std::string& name) {
    if (name == "rad") return Searcher::Rad;
    if (name == "nsn") return Searcher::NSN;
    if (name == "naive") return Searcher::Naive;
    if (name == "hill") return Searcher::Hill;
    throw ConfigError("unknown algorithm '" + name + "' (rad|nsn|naive|hill)");
}

std::string searcher_name(Searcher s) {
    switch (s) {
    case Searcher::Rad: return "rad";
    case Searcher::NSN: return "nsn";
    case Searcher::Naive: return "naive";
    case Searcher::Hill: return "hill";
    }
    return "?";
}

void TopN::offer(Rule rule, const double* stats, std::size_t dim, double score) {
    if (score == kNegInf) return;
    ScoredRule sr{std::move(rule), std::vector<double>(stats, stats + dim), score};
    kept_.insert(std::move(sr));
    if (kept_.size() > cap_) kept_.erase(std::prev(kept_.end()));
}

std::optional<double> TopN::worst_kept() const {
    if (kept_.size() < cap_) return std::nullopt;
    return std::prev(kept_.end())->score;
}

void TopN::merge(TopN&& other) {
    for (auto& sr : other.kept_) kept_.insert(sr);
    while (kept_.size() > cap_) kept_.erase(std::prev(kept_.end()));
}

std::vector<ScoredRule> TopN::take_sorted() {
    std::vector<ScoredRule> out(kept_.begin(), kept_.end());
    kept_.clear();
    return out;
}

bool prune_check(const SearchConfig& cfg, std::span<const double> cell_stats,
                 const ScoreContext& ctx, std::optional<double> worst_kept) {
    if (!worst_kept) return false; // collector not full: nothing to beat yet
    // Strict <: a specialization tying the worst score could still displace
    // it on the length/lexicographic tie-break, and pruned runs must return
    // lists identical to unpruned ones.
    return score_bound(cfg.score, cell_stats, ctx) < *worst_kept;
}

namespace {

// Shared pre-flight: flag validation, eligible attributes, in-play rows,
// materialized statvecs, score context.
struct Prep {
    std::vector<int> eligible;
    std::vector<std::int32_t> in_play;
    StatMatrix mat;
    ScoreContext ctx;
};

Prep prepare(const Dataset& ds, const SearchConfig& cfg) {
    if (cfg.spec.dim() == 0) throw ConfigError("search: statvec spec is unset");
    check_spec_shape(cfg.score, cfg.spec);
    if (cfg.k < 1) throw ConfigError("search: k must be >= 1");
    if (cfg.top_n < 1) throw ConfigError("search: top_n must be >= 1");
    if (cfg.threads < 1) throw ConfigError("search: threads must be >= 1");
    if (cfg.pruning && !score_has_bound(cfg.score))
        throw ConfigError("pruning requires a score with an optimistic bound (strength or impact)");

    Prep p;
    std::vector<bool> excluded(std::size_t(ds.n_attributes()), false);
    for (int a : cfg.excluded_attributes) {
        if (a < 0 || a >= ds.n_attributes())
            throw ConfigError("search: excluded attribute index out of range");
        excluded[std::size_t(a)] = true;
    }
    for (int a = 0; a < ds.n_attributes(); ++a)
        if (!excluded[std::size_t(a)]) p.eligible.push_back(a);
    if (int(p.eligible.size()) < cfg.k)
        throw ConfigError("search: k exceeds the number of eligible attributes");

    if (cfg.in_play_rows) {
        p.in_play = *cfg.in_play_rows;
        for (std::size_t i = 0; i < p.in_play.size(); ++i) {
            if (p.in_play[i] < 0 || std::size_t(p.in_play[i]) >= ds.n_rows())
                throw ContractViolation("search: in-play row index out of range");
            if (i > 0 && p.in_play[i - 1] >= p.in_play[i])
                throw ContractViolation("search: in-play rows must be sorted and distinct");
        }
    } else {
        p.in_play.resize(ds.n_rows());
        std::iota(p.in_play.begin(), p.in_play.end(), 0);
    }
    if (p.in_play.empty()) throw ConfigError("search: no in-play rows");
    if (p.in_play.size() < cfg.n_support)
        throw ConfigError("search: support threshold exceeds the in-play row count");

    p.mat = materialize(ds, cfg.spec);
    p.ctx.n_support = cfg.n_support;
    p.ctx.global.assign(p.mat.dim, 0.0);
    kernels::active().sum_rows(p.ctx.global.data(), p.mat.data.data(), p.mat.dim,
                               p.in_play.data(), p.in_play.size());
    p.ctx.n_global = double(p.in_play.size());
    int t = cfg.spec.first_target();
    if (t >= 0) {
        const auto& col = ds.targets[std::size_t(t)];
        double mx = col[std::size_t(p.in_play.front())];
        for (std::int32_t r : p.in_play) mx = std::max(mx, col[std::size_t(r)]);
        p.ctx.max_target = mx;
    }
    return p;
}

// Lexicographic q-combinations of {0..n-1}.
template <typename Fn>
void for_each_combo(int n, int q, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(q));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(idx);
        int i = q - 1;
        while (i >= 0 && idx[std::size_t(i)] == n - q + i) --i;
        if (i < 0) break;
        ++idx[std::size_t(i)];
        for (int j = i + 1; j < q; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }
}

void score_cells(const DataCube& cube, ScoreKind kind, const ScoreContext& ctx, TopN& top,
                 SearchStats& st) {
    for (std::size_t i = 0; i < cube.n_cells(); ++i) {
        ++st.rules_scored;
        std::span<const double> s(cube.cell(i), cube.dim);
        double sc = score_eval(kind, s, ctx);
        if (sc == kNegInf) continue;
        Rule ru;
        auto values = cube.values_of_cell(i);
        for (std::size_t j = 0; j < cube.attrs.size(); ++j)
            ru.literals.emplace_back(cube.attrs[j], values[j]);
        top.offer(std::move(ru), cube.cell(i), cube.dim, sc);
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct RadWorkerOut {
    TopN top;
    SearchStats st;
    std::size_t split_rows = 0;
    std::size_t surviving_rows = 0;

    explicit RadWorkerOut(std::size_t cap) : top(cap) {}
};

// One worker's share of the iterative-deepening enumeration. Shallow passes
// (q < k) are walked by every worker so each private AD-tree is complete for
// the subsets the worker will cube at pass k; scoring of a subset's table is
// done only by its owner (round-robin on the subset's first attribute).
void rad_worker(const Dataset& ds, const SearchConfig& cfg, const Prep& p, int worker_id,
                int n_workers, RadWorkerOut& out) {
    int mp = int(p.eligible.size());
    RowTree rt(ds, p.mat, p.in_play);
    ADTree ad(ds, p.mat.dim, cfg.k - 1, p.ctx.global, cfg.memory_budget_bytes);
    std::set<std::vector<int>> pruned;
    std::vector<int> attrs;

    auto has_pruned_ancestor = [&](const std::vector<int>& a) {
        if (pruned.empty()) return false;
        int q = int(a.size());
        for (int mask = 1; mask < (1 << q) - 1; ++mask) {
            std::vector<int> sub;
            for (int j = 0; j < q; ++j)
                if (mask & (1 << j)) sub.push_back(a[std::size_t(j)]);
            if (pruned.count(sub)) return true;
        }
        return false;
    };

    for (int q = 1; q <= cfg.k; ++q) {
        rt.reset();
        for_each_combo(mp, q, [&](const std::vector<int>& idx) {
            bool mine = idx[0] % n_workers == worker_id;
            if (q == cfg.k && !mine) return;
            attrs.clear();
            for (int i : idx) attrs.push_back(p.eligible[std::size_t(i)]);
            bool prunable = cfg.pruning && has_pruned_ancestor(attrs);
            if (prunable && q == cfg.k) {
                ++out.st.tables_pruned;
                return; // final pass: skip the block entirely
            }
            rt.retarget(attrs);
            ++out.st.rowtrees_built;
            if (q < cfg.k) ad.insert(rt); // needed even under a pruned prefix
            if (prunable) {
                if (mine) ++out.st.tables_pruned;
                return;
            }
            if (!mine) return; // built for AD completeness only
            DataCube cube = build_dc(rt, ad);
            ++out.st.cubes_evaluated;
            score_cells(cube, cfg.score, p.ctx, out.top, out.st);
            if (cfg.pruning) {
                auto worst = out.top.worst_kept();
                bool all = true;
                for (std::size_t i = 0; all && i < cube.n_cells(); ++i)
                    all = prune_check(cfg, {cube.cell(i), cube.dim}, p.ctx, worst);
                if (all) pruned.insert(attrs);
            }
        });
    }

    out.st.tweaks_per_level = rt.counters().tweaks_per_level;
    out.st.adtree_nodes = ad.node_count();
    out.st.adtree_nodes_per_depth = ad.nodes_per_depth();
    out.split_rows = rt.counters().split_rows;
    out.surviving_rows = rt.counters().surviving_rows;
}

} // namespace

SearchResult radsearch(const Dataset& ds, const SearchConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Prep p = prepare(ds, cfg);

    TopN top(cfg.top_n);
    SearchStats st;
    ++st.rules_scored; // the empty rule, the q=0 table
    ++st.cubes_evaluated;
    double empty_score = score_eval(cfg.score, p.ctx.global, p.ctx);
    if (empty_score != kNegInf) top.offer(Rule{}, p.ctx.global.data(), p.mat.dim, empty_score);

    int n_workers = std::min<int>(cfg.threads, int(p.eligible.size()));
    std::vector<RadWorkerOut> outs;
    outs.reserve(std::size_t(n_workers));
    for (int w = 0; w < n_workers; ++w) outs.emplace_back(cfg.top_n);

    if (n_workers == 1) {
        rad_worker(ds, cfg, p, 0, 1, outs[0]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(std::size_t(n_workers));
        for (int w = 0; w < n_workers; ++w)
            threads.emplace_back(rad_worker, std::cref(ds), std::cref(cfg), std::cref(p), w,
                                 n_workers, std::ref(outs[std::size_t(w)]));
        for (auto& t : threads) t.join();
    }

    std::size_t split = 0, surviving = 0;
    for (auto& o : outs) {
        top.merge(std::move(o.top));
        st.rules_scored += o.st.rules_scored;
        st.cubes_evaluated += o.st.cubes_evaluated;
        st.rowtrees_built += o.st.rowtrees_built;
        st.tables_pruned += o.st.tables_pruned;
        st.adtree_nodes += o.st.adtree_nodes;
        if (st.tweaks_per_level.size() < o.st.tweaks_per_level.size())
            st.tweaks_per_level.resize(o.st.tweaks_per_level.size(), 0);
        for (std::size_t d = 0; d < o.st.tweaks_per_level.size(); ++d)
            st.tweaks_per_level[d] += o.st.tweaks_per_level[d];
        if (st.adtree_nodes_per_depth.size() < o.st.adtree_nodes_per_depth.size())
            st.adtree_nodes_per_depth.resize(o.st.adtree_nodes_per_depth.size(), 0);
        for (std::size_t d = 0; d < o.st.adtree_nodes_per_depth.size(); ++d)
            st.adtree_nodes_per_depth[d] += o.st.adtree_nodes_per_depth[d];
        split += o.split_rows;
        surviving += o.surviving_rows;
    }
    if (split > 0) st.lambda_hat = double(surviving) / double(split);

    SearchResult res{top.take_sorted(), std::move(st)};
    res.stats.elapsed_seconds = seconds_since(t0);
    return res;
}

SearchResult nsn_search(const Dataset& ds, const SearchConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Prep p = prepare(ds, cfg);

    TopN top(cfg.top_n);
    SearchStats st;
    ++st.rules_scored;
    ++st.cubes_evaluated; // the 0-dimensional table
    double empty_score = score_eval(cfg.score, p.ctx.global, p.ctx);
    if (empty_score != kNegInf) top.offer(Rule{}, p.ctx.global.data(), p.mat.dim, empty_score);

    std::vector<int> attrs;
    for (int q = 1; q <= cfg.k; ++q) {
        for_each_combo(int(p.eligible.size()), q, [&](const std::vector<int>& idx) {
            attrs.clear();
            for (int i : idx) attrs.push_back(p.eligible[std::size_t(i)]);
            DataCube cube = scan_cube(ds, p.mat, attrs, p.in_play);
            ++st.cubes_evaluated;
            score_cells(cube, cfg.score, p.ctx, top, st);
        });
    }

    SearchResult res{top.take_sorted(), std::move(st)};
    res.stats.elapsed_seconds = seconds_since(t0);
    return res;
}

SearchResult naive_search(const Dataset& ds, const SearchConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Prep p = prepare(ds, cfg);

    TopN top(cfg.top_n);
    SearchStats st;
    ++st.rules_scored;
    double empty_score = score_eval(cfg.score, p.ctx.global, p.ctx);
    if (empty_score != kNegInf) top.offer(Rule{}, p.ctx.global.data(), p.mat.dim, empty_score);

    std::vector<int> attrs;
    for (int q = 1; q <= cfg.k; ++q) {
        for_each_combo(int(p.eligible.size()), q, [&](const std::vector<int>& idx) {
            attrs.clear();
            for (int i : idx) attrs.push_back(p.eligible[std::size_t(i)]);
            Rule ru;
            for (int a : attrs) ru.literals.emplace_back(a, 0);
            while (true) {
                std::vector<double> s = scan_rule(ds, p.mat, ru, p.in_play);
                ++st.rules_scored;
                double sc = score_eval(cfg.score, s, p.ctx);
                if (sc != kNegInf) top.offer(ru, s.data(), p.mat.dim, sc);
                // next value tuple, last attribute fastest
                int j = q - 1;
                while (j >= 0 &&
                       ru.literals[std::size_t(j)].second + 1 >= ds.arity(attrs[std::size_t(j)]))
                    --j;
                if (j < 0) break;
                ++ru.literals[std::size_t(j)].second;
                for (int m = j + 1; m < q; ++m) ru.literals[std::size_t(m)].second = 0;
            }
        });
    }

    SearchResult res{top.take_sorted(), std::move(st)};
    res.stats.elapsed_seconds = seconds_since(t0);
    return res;
}

SearchResult hill_climb(const Dataset& ds, const SearchConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Prep p = prepare(ds, cfg);

    TopN top(cfg.top_n);
    SearchStats st;

    Rule current;
    double current_score = kNegInf;
    std::vector<std::int32_t> rows = p.in_play;

    while (int(current.size()) < cfg.k) {
        bool have_best = false;
        double best_score = kNegInf;
        std::pair<int, std::int32_t> best_lit{-1, -1};
        std::vector<double> best_stats;
        for (int a : p.eligible) {
            bool used = false;
            for (const auto& [la, lv] : current.literals) used = used || la == a;
            if (used) continue;
            DataCube cube = scan_cube(ds, p.mat, {a}, rows);
            ++st.cubes_evaluated;
            for (std::size_t i = 0; i < cube.n_cells(); ++i) {
                ++st.rules_scored;
                std::span<const double> s(cube.cell(i), cube.dim);
                double sc = score_eval(cfg.score, s, p.ctx);
                if (sc == kNegInf) continue;
                std::pair<int, std::int32_t> lit{a, std::int32_t(i)};
                if (!have_best || sc > best_score || (sc == best_score && lit < best_lit)) {
                    have_best = true;
                    best_score = sc;
                    best_lit = lit;
                    best_stats.assign(s.begin(), s.end());
                }
            }
        }
        if (!have_best || best_score <= current_score) break; // strict improvement only
        current.literals.push_back(best_lit);
        std::sort(current.literals.begin(), current.literals.end());
        current_score = best_score;
        top.offer(current, best_stats.data(), p.mat.dim, current_score);
        std::vector<std::int32_t> next_rows;
        const auto& col = ds.columns[std::size_t(best_lit.first)];
        for (std::int32_t r : rows)
            if (col[std::size_t(r)] == best_lit.second) next_rows.push_back(r);
        rows = std::move(next_rows);
    }

    SearchResult res{top.take_sorted(), std::move(st)};
    res.stats.elapsed_seconds = seconds_since(t0);
    return res;
}

SearchResult run_search(Searcher which, const Dataset& ds, const SearchConfig& cfg) {
    switch (which) {
    case Searcher::Rad: return radsearch(ds, cfg);
    case Searcher::NSN: return nsn_search(ds, cfg);
    case Searcher::Naive: return naive_search(ds, cfg);
    case Searcher::Hill: return hill_climb(ds, cfg);
    }
    throw ConfigError("bad searcher");
}

double naive_cost_estimate(const Dataset& ds, const SearchConfig& cfg) {
    std::vector<int> eligible;
    std::vector<bool> excluded(std::size_t(ds.n_attributes()), false);
    for (int a : cfg.excluded_attributes)
        if (a >= 0 && a < ds.n_attributes()) excluded[std::size_t(a)] = true;
    for (int a = 0; a < ds.n_attributes(); ++a)
        if (!excluded[std::size_t(a)]) eligible.push_back(a);
    double rules = 1.0;
    for (int q = 1; q <= std::min<int>(cfg.k, int(eligible.size())); ++q)
        for_each_combo(int(eligible.size()), q, [&](const std::vector<int>& idx) {
            double cells = 1.0;
            for (int i : idx) cells *= double(ds.arity(eligible[std::size_t(i)]));
            rules += cells;
        });
    std::size_t r = cfg.in_play_rows ? cfg.in_play_rows->size() : ds.n_rows();
    return rules * double(r);
}

} // namespace rad
