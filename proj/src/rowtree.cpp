#include "rad/rowtree.hpp"
#include "rad/errors.hpp"
#include "rad/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace rad {

namespace {

std::vector<double> sum_over(const StatMatrix& mat, const std::vector<std::int32_t>& rows) {
    std::vector<double> s(mat.dim, 0.0);
    kernels::active().sum_rows(s.data(), mat.data.data(), mat.dim, rows.data(), rows.size());
    return s;
}

} // namespace

RowTree::RowTree(const Dataset& ds, const StatMatrix& mat, std::vector<std::int32_t> in_play)
    : ds_(&ds), mat_(&mat), root_(std::make_unique<RowTreeNode>()) {
    if (mat.rows != ds.n_rows())
        throw ContractViolation("rowtree: stat matrix does not match dataset");
    root_->rows = std::move(in_play);
    root_->stats = sum_over(mat, root_->rows);
}

void RowTree::split_node(RowTreeNode& node, int attribute) {
    const auto& col = ds_->columns[std::size_t(attribute)];
    int arity = ds_->arity(attribute);

    std::vector<std::size_t> counts(std::size_t(arity), 0);
    for (std::int32_t r : node.rows) ++counts[std::size_t(col[std::size_t(r)])];

    std::int32_t mcv = 0;
    for (std::int32_t v = 1; v < arity; ++v)
        if (counts[std::size_t(v)] > counts[std::size_t(mcv)]) mcv = v; // ties stay low

    node.split_attribute = attribute;
    node.mcv = mcv;
    node.children.clear();
    node.children.resize(std::size_t(arity));
    for (std::int32_t v = 0; v < arity; ++v) {
        if (v == mcv || counts[std::size_t(v)] == 0) continue;
        auto child = std::make_unique<RowTreeNode>();
        child->rows.reserve(counts[std::size_t(v)]);
        node.children[std::size_t(v)] = std::move(child);
    }
    for (std::int32_t r : node.rows) {
        std::int32_t v = col[std::size_t(r)];
        if (v != mcv) node.children[std::size_t(v)]->rows.push_back(r);
    }
    for (auto& c : node.children)
        if (c) {
            c->stats = sum_over(*mat_, c->rows);
            counters_.surviving_rows += c->rows.size();
        }
    counters_.split_rows += node.rows.size();
}

void RowTree::split_level(RowTreeNode& node, std::size_t depth, std::size_t target,
                          int attribute) {
    if (depth == target) {
        node.children.clear();
        node.split_attribute = -1;
        node.mcv = -1;
        if (attribute >= 0) split_node(node, attribute); // < 0: truncate only
        return;
    }
    for (auto& c : node.children)
        if (c) split_level(*c, depth + 1, target, attribute);
}

void RowTree::tweak(std::size_t level, int attribute) {
    if (level > attrs_.size())
        throw ContractViolation("tweak: level beyond the current deepest+1");
    if (level > 0 && attrs_[level - 1] >= attribute)
        throw ContractViolation("tweak: attribute list would become unsorted");
    if (attribute < 0 || attribute >= ds_->n_attributes())
        throw ContractViolation("tweak: attribute index out of range");

    attrs_.resize(level);
    attrs_.push_back(attribute);
    if (counters_.tweaks_per_level.size() <= level)
        counters_.tweaks_per_level.resize(level + 1, 0);
    ++counters_.tweaks_per_level[level];
    split_level(*root_, 0, level, attribute);
}

void RowTree::retarget(const std::vector<int>& attrs) {
    for (std::size_t i = 0; i + 1 < attrs.size(); ++i)
        if (attrs[i] >= attrs[i + 1])
            throw ContractViolation("retarget: attribute list must be sorted and distinct");
    std::size_t common = 0;
    while (common < attrs.size() && common < attrs_.size() && attrs_[common] == attrs[common])
        ++common;
    if (common == attrs.size() && attrs.size() == attrs_.size()) return; // identical
    if (common == attrs.size()) {
        // Pure truncation: make depth-|attrs| nodes leaves; no resplit work.
        attrs_.resize(common);
        split_level(*root_, 0, common, -1);
        return;
    }
    for (std::size_t d = common; d < attrs.size(); ++d) tweak(d, attrs[d]);
}

void RowTree::reset() {
    attrs_.clear();
    root_->children.clear();
    root_->split_attribute = -1;
    root_->mcv = -1;
}

std::optional<double> RowTree::measured_lambda() const {
    double weighted = 0.0, weight = 0.0;
    bool any = false;
    std::vector<const RowTreeNode*> stack{root_.get()};
    while (!stack.empty()) {
        const RowTreeNode* n = stack.back();
        stack.pop_back();
        if (n->is_leaf()) continue;
        any = true;
        if (!n->rows.empty()) {
            std::size_t survivors = 0;
            for (const auto& c : n->children)
                if (c) {
                    survivors += c->rows.size();
                    stack.push_back(c.get());
                }
            weighted += double(survivors);
            weight += double(n->rows.size());
        }
    }
    if (!any || weight == 0.0) return std::nullopt;
    return weighted / weight;
}

std::size_t RowTree::stored_row_indices() const {
    std::size_t total = 0;
    std::vector<const RowTreeNode*> stack{root_.get()};
    while (!stack.empty()) {
        const RowTreeNode* n = stack.back();
        stack.pop_back();
        total += n->rows.size();
        for (const auto& c : n->children)
            if (c) stack.push_back(c.get());
    }
    return total;
}

RowTree build_rowtree(const Dataset& ds, const StatMatrix& mat,
                      const std::vector<int>& attributes, std::vector<std::int32_t> rows) {
    RowTree rt(ds, mat, std::move(rows));
    for (std::size_t d = 0; d < attributes.size(); ++d) rt.tweak(d, attributes[d]);
    return rt;
}

namespace {

bool equal_nodes(const RowTreeNode& a, const RowTreeNode& b) {
    if (a.rows != b.rows || a.split_attribute != b.split_attribute || a.mcv != b.mcv)
        return false;
    if (a.stats != b.stats) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!a.children[i] != !b.children[i]) return false;
        if (a.children[i] && !equal_nodes(*a.children[i], *b.children[i])) return false;
    }
    return true;
}

} // namespace

bool equal_trees(const RowTree& a, const RowTree& b) {
    return a.attributes() == b.attributes() && equal_nodes(a.root(), b.root());
}

} // namespace rad
