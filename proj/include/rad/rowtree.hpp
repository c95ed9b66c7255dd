#pragma once

#include "rad/dataset.hpp"
#include "rad/statvec.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace rad {

// One node of a rowtree. Children are indexed densely by value code; the
// slot for the node's MCV is always null (that branch is elided and later
// reconstructed by subtraction), as are slots for values no row takes.
struct RowTreeNode {
    std::vector<std::int32_t> rows; // sorted, inherited order from parent
    std::vector<double> stats;      // sumstats over rows
    int split_attribute = -1;       // -1 at leaves
    std::int32_t mcv = -1;
    std::vector<std::unique_ptr<RowTreeNode>> children;

    bool is_leaf() const { return split_attribute < 0; }
};

// Work accounting for the tweak audit and the lambda estimate.
struct TweakCounters {
    std::vector<std::size_t> tweaks_per_level;
    std::size_t split_rows = 0;     // rows held by nodes when they were split
    std::size_t surviving_rows = 0; // rows stored into (non-MCV) children
};

// Mutable per-worker index over one attribute subset at a time. Built once as
// a bare root, then moved between lexicographically adjacent subsets with
// tweak(): all levels above the changed one are reused untouched.
class RowTree {
  public:
    RowTree(const Dataset& ds, const StatMatrix& mat, std::vector<std::int32_t> in_play);

    const std::vector<int>& attributes() const { return attrs_; }
    const RowTreeNode& root() const { return *root_; }
    const Dataset& dataset() const { return *ds_; }
    std::size_t dim() const { return mat_->dim; }

    // Replace attrs[level] (truncating anything deeper) with `attribute` and
    // resplit every level-`level` node. level == attrs.size() appends a new
    // deepest level. The result must stay sorted and distinct.
    void tweak(std::size_t level, int attribute); // throws ContractViolation

    // Minimal tweak sequence moving the tree to `attrs` (sorted, distinct):
    // keeps the common prefix, tweaks the rest level by level.
    void retarget(const std::vector<int>& attrs);

    // Drop all splits; the tree becomes a bare root again (not a tweak).
    void reset();

    // Row-weighted mean over split nodes of the child-surviving row fraction.
    // nullopt for a bare root (nothing was ever split).
    std::optional<double> measured_lambda() const;

    std::size_t stored_row_indices() const; // across all nodes, root included

    const TweakCounters& counters() const { return counters_; }
    TweakCounters& counters() { return counters_; }

  private:
    const Dataset* ds_;
    const StatMatrix* mat_;
    std::vector<int> attrs_;
    std::unique_ptr<RowTreeNode> root_;
    TweakCounters counters_;

    void split_node(RowTreeNode& node, int attribute);
    void split_level(RowTreeNode& node, std::size_t depth, std::size_t target, int attribute);
};

// Fresh full build over a fixed attribute list; the reference the tweak path
// is tested against.
RowTree build_rowtree(const Dataset& ds, const StatMatrix& mat,
                      const std::vector<int>& attributes, std::vector<std::int32_t> rows);

// Structural equality: attribute list, and per node rows, stats (exact),
// split attribute, MCV, and child layout.
bool equal_trees(const RowTree& a, const RowTree& b);

} // namespace rad
