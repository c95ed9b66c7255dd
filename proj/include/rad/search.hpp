#pragma once

#include "rad/dataset.hpp"
#include "rad/rule.hpp"
#include "rad/score.hpp"
#include "rad/statvec.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace rad {

enum class Searcher { Rad, NSN, Naive, Hill };

Searcher searcher_from_name(const std::string& name); // rad|nsn|naive|hill
std::string searcher_name(Searcher s);

struct SearchConfig {
    int k = 1;
    std::size_t n_support = 1;
    ScoreKind score = ScoreKind::MeanTarget;
    StatVecSpec spec; // must be set (dim >= 1)
    std::size_t top_n = 1;
    std::vector<int> excluded_attributes;
    bool pruning = false;
    std::optional<std::vector<std::int32_t>> in_play_rows; // nullopt = all rows
    int threads = 1;
    std::size_t memory_budget_bytes = 0; // 0 = unlimited
};

struct ScoredRule {
    Rule rule;
    std::vector<double> stats;
    double score = 0.0;
};

// Ranking shared by every searcher: score descending, then rule length
// ascending, then literal list ascending. Total, so ranked lists compare
// exactly across algorithms.
struct ResultOrder {
    bool operator()(const ScoredRule& a, const ScoredRule& b) const {
        if (a.score != b.score) return a.score > b.score;
        if (a.rule.size() != b.rule.size()) return a.rule.size() < b.rule.size();
        return a.rule.literals < b.rule.literals;
    }
};

struct SearchStats {
    std::size_t rules_scored = 0;
    std::size_t cubes_evaluated = 0;
    std::size_t rowtrees_built = 0; // attribute subsets materialized as trees
    std::vector<std::size_t> tweaks_per_level;
    std::size_t adtree_nodes = 0;
    std::vector<std::size_t> adtree_nodes_per_depth;
    std::size_t tables_pruned = 0;
    std::optional<double> lambda_hat;
    double elapsed_seconds = 0.0;
};

struct SearchResult {
    std::vector<ScoredRule> rules; // ranked, <= top_n, never -inf
    SearchStats stats;
};

// Bounded best-first store; -inf never enters, worst entry drops when full.
class TopN {
  public:
    explicit TopN(std::size_t cap) : cap_(cap) {}

    void offer(Rule rule, const double* stats, std::size_t dim, double score);
    bool full() const { return kept_.size() >= cap_; }
    // Score a new table must beat; nullopt while the collector is not full.
    std::optional<double> worst_kept() const;
    void merge(TopN&& other);
    std::vector<ScoredRule> take_sorted();

  private:
    std::size_t cap_;
    std::set<ScoredRule, ResultOrder> kept_;
};

// True when the whole-table prune of every descendant of this cell's table is
// justified: the collector is full and no specialization can beat its worst.
bool prune_check(const SearchConfig& cfg, std::span<const double> cell_stats,
                 const ScoreContext& ctx, std::optional<double> worst_kept);

SearchResult radsearch(const Dataset& ds, const SearchConfig& cfg);
SearchResult nsn_search(const Dataset& ds, const SearchConfig& cfg);
SearchResult naive_search(const Dataset& ds, const SearchConfig& cfg);
SearchResult hill_climb(const Dataset& ds, const SearchConfig& cfg);

SearchResult run_search(Searcher which, const Dataset& ds, const SearchConfig& cfg);

// Rule-count estimate behind the CLI's naive cost guard: sum over attribute
// subsets of size <= k of the product of arities, times the row count.
double naive_cost_estimate(const Dataset& ds, const SearchConfig& cfg);

} // namespace rad
