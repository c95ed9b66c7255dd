#include "rad/adtree.hpp"
#include "rad/errors.hpp"
#include "rad/kernels.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace rad {

namespace {

// Rough per-node footprint: the stats payload plus map/pointer overhead.
std::size_t node_bytes(std::size_t dim) {
    return sizeof(ADNode) + dim * sizeof(double) + 64;
}

} // namespace

ADTree::ADTree(const Dataset& ds, std::size_t dim, int depth_cap,
               std::vector<double> root_stats, std::size_t memory_budget_bytes)
    : ds_(&ds), dim_(dim), cap_(depth_cap), budget_(memory_budget_bytes) {
    if (depth_cap < 0) throw ContractViolation("adtree: negative depth cap");
    if (root_stats.size() != dim) throw ContractViolation("adtree: root stats dim mismatch");
    root_.stats = std::move(root_stats);
}

void ADTree::insert(const RowTree& rt) {
    if (int(rt.attributes().size()) > cap_)
        throw ContractViolation("adtree: inserting a tree deeper than the cap");
    insert_node(root_, rt.root(), 0, rt.attributes());
}

void ADTree::insert_node(ADNode& at, const RowTreeNode& rtn, int depth,
                         const std::vector<int>& attrs) {
    at.stats = rtn.stats;
    if (rtn.is_leaf()) return;
    VaryNode& vn = at.vary[attrs[std::size_t(depth)]];
    vn.mcv = rtn.mcv;
    for (std::size_t v = 0; v < rtn.children.size(); ++v) {
        if (!rtn.children[v]) continue;
        auto& slot = vn.children[std::int32_t(v)];
        if (!slot) {
            slot = std::make_unique<ADNode>();
            ++node_count_;
            if (budget_ && node_count_ * node_bytes(dim_) > budget_)
                throw RuntimeError(
                    "AD-tree memory budget exceeded (" + std::to_string(node_count_) +
                    " nodes); re-run with a smaller k or a larger memory budget");
        }
        insert_node(*slot, *rtn.children[std::size_t(v)], depth + 1, attrs);
    }
}

// Conjunctive sumstats query with MCV reconstruction: descending a stored
// branch consumes the literal; hitting the MCV rewrites the query as (same
// condition without the literal) minus (every stored sibling), flipping the
// accumulation sign down that arm.
void ADTree::query(const ADNode& node, const std::vector<std::pair<int, std::int32_t>>& lits,
                   std::size_t i, double* out, double sign) {
    if (i == lits.size()) {
        if (sign > 0) kernels::active().add(out, node.stats.data(), dim_);
        else kernels::active().sub_inplace(out, node.stats.data(), dim_);
        return;
    }
    auto [a, v] = lits[i];
    auto vit = node.vary.find(a);
    if (vit == node.vary.end())
        throw CacheMiss("adtree: no vary node for attribute " +
                        ds_->attribute_names[std::size_t(a)] + " at the queried path");
    const VaryNode& vn = vit->second;
    if (v != vn.mcv) {
        auto cit = vn.children.find(v);
        if (cit == vn.children.end()) return; // no row matched: zero contribution
        query(*cit->second, lits, i + 1, out, sign);
        return;
    }
    query(node, lits, i + 1, out, sign);
    for (const auto& [cv, child] : vn.children) query(*child, lits, i + 1, out, -sign);
}

DataCube ADTree::query_cube(const std::vector<int>& cube_attrs, const Rule& condition) {
    if (int(cube_attrs.size() + condition.size()) > cap_)
        throw ContractViolation("adtree: query capacity exceeded (r + s > depth cap)");
    for (int a : cube_attrs)
        for (const auto& [ca, cv] : condition.literals)
            if (ca == a)
                throw ContractViolation("adtree: cube attribute also appears in the condition");

    DataCube cube = make_cube(*ds_, dim_, cube_attrs);
    std::vector<std::pair<int, std::int32_t>> lits;
    for (std::size_t i = 0; i < cube.n_cells(); ++i) {
        auto values = cube.values_of_cell(i);
        lits.clear();
        lits.insert(lits.end(), condition.literals.begin(), condition.literals.end());
        for (std::size_t j = 0; j < cube_attrs.size(); ++j)
            lits.emplace_back(cube_attrs[j], values[j]);
        std::sort(lits.begin(), lits.end());
        query(root_, lits, 0, cube.cell(i), 1.0);
    }
    return cube;
}

std::vector<std::size_t> ADTree::nodes_per_depth() const {
    std::vector<std::size_t> counts;
    std::vector<std::pair<const ADNode*, std::size_t>> stack{{&root_, 0}};
    while (!stack.empty()) {
        auto [n, d] = stack.back();
        stack.pop_back();
        if (counts.size() <= d) counts.resize(d + 1, 0);
        ++counts[d];
        for (const auto& [a, vn] : n->vary)
            for (const auto& [v, child] : vn.children) stack.push_back({child.get(), d + 1});
    }
    return counts;
}

std::size_t ADTree::memory_estimate_bytes() const { return node_count_ * node_bytes(dim_); }

void ADTree::for_each_vary(
    const std::function<void(const Rule&, const ADNode&, int, const VaryNode&)>& fn) const {
    std::vector<std::pair<const ADNode*, Rule>> stack{{&root_, Rule{}}};
    while (!stack.empty()) {
        auto [n, path] = stack.back();
        stack.pop_back();
        for (const auto& [a, vn] : n->vary) {
            fn(path, *n, a, vn);
            for (const auto& [v, child] : vn.children) {
                Rule ext = path;
                ext.literals.push_back({a, v});
                stack.push_back({child.get(), std::move(ext)});
            }
        }
    }
}

namespace {

void dump_node(std::ostringstream& os, const ADNode& n, std::string path) {
    os << path << " stats=[";
    for (std::size_t j = 0; j < n.stats.size(); ++j) {
        if (j) os << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.stats[j]);
        os << buf;
    }
    os << "]\n";
    for (const auto& [a, vn] : n.vary) {
        os << path << " vary a" << a << " mcv=" << vn.mcv << "\n";
        for (const auto& [v, child] : vn.children)
            dump_node(os, *child, path + "/a" + std::to_string(a) + "=" + std::to_string(v));
    }
}

} // namespace

std::string ADTree::debug_dump() const {
    std::ostringstream os;
    dump_node(os, root_, "");
    return os.str();
}

} // namespace rad
