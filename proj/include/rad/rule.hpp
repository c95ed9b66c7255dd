#pragma once

#include "rad/dataset.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rad {

// Conjunction of attribute=value literals, attributes strictly increasing.
// The empty rule matches every row.
struct Rule {
    std::vector<std::pair<int, std::int32_t>> literals;

    bool empty() const { return literals.empty(); }
    std::size_t size() const { return literals.size(); }

    bool matches(const Dataset& ds, std::size_t row) const {
        for (const auto& [a, v] : literals)
            if (ds.columns[std::size_t(a)][row] != v) return false;
        return true;
    }

    bool operator==(const Rule& o) const { return literals == o.literals; }

    std::string to_string(const Dataset& ds) const {
        if (literals.empty()) return "(true)";
        std::string s;
        for (std::size_t i = 0; i < literals.size(); ++i) {
            if (i) s += " ∧ "; // " ∧ "
            auto [a, v] = literals[i];
            s += ds.attribute_names[std::size_t(a)] + "=" +
                 ds.levels[std::size_t(a)][std::size_t(v)];
        }
        return s;
    }
};

} // namespace rad
