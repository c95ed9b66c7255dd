#pragma once

#include "rad/cube.hpp"
#include "rad/dataset.hpp"
#include "rad/rowtree.hpp"
#include "rad/rule.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rad {

struct ADNode;

// Per-attribute branch under an ADNode. The child for the conditional MCV is
// never stored; its sumstats is parent minus the stored children.
struct VaryNode {
    std::int32_t mcv = -1;
    std::map<std::int32_t, std::unique_ptr<ADNode>> children;
};

struct ADNode {
    std::vector<double> stats;
    std::map<int, VaryNode> vary; // attribute -> branch; attrs exceed the path's
};

// Depth-capped sumstats cache, grown lazily by inserting rowtrees during the
// enumeration passes and queried by BuildDC. Content that was never inserted
// raises CacheMiss — a miss means the enumeration order is broken, so it is
// never silently recomputed.
class ADTree {
  public:
    ADTree(const Dataset& ds, std::size_t dim, int depth_cap, std::vector<double> root_stats,
           std::size_t memory_budget_bytes = 0);

    // Records every node of rt (condition path, sumstats, MCV tag).
    // Idempotent for identical content. Throws ContractViolation when the
    // tree is deeper than the cap, RuntimeError when the budget is exceeded.
    void insert(const RowTree& rt);

    // DC(cube_attrs | condition): |cube_attrs| + |condition| must be within
    // the depth cap; condition attributes and cube attributes disjoint.
    DataCube query_cube(const std::vector<int>& cube_attrs, const Rule& condition);

    int depth_cap() const { return cap_; }
    std::size_t node_count() const { return node_count_; }
    std::vector<std::size_t> nodes_per_depth() const;
    std::size_t memory_estimate_bytes() const;

    // Deterministic structural dump (maps are ordered); tests use it for
    // idempotency checks and the CLI for --debug-adtree.
    std::string debug_dump() const;

    // Visits every (condition, parent node, attribute, vary node) tuple, where
    // condition is the literal path from the root to the parent node.
    void for_each_vary(
        const std::function<void(const Rule&, const ADNode&, int, const VaryNode&)>& fn) const;

  private:
    const Dataset* ds_;
    std::size_t dim_;
    int cap_;
    std::size_t budget_;
    std::size_t node_count_ = 1;
    ADNode root_;

    void insert_node(ADNode& at, const RowTreeNode& rtn, int depth,
                     const std::vector<int>& attrs);
    void query(const ADNode& node, const std::vector<std::pair<int, std::int32_t>>& lits,
               std::size_t i, double* out, double sign);
};

} // namespace rad
