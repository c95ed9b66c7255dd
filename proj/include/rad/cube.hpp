#pragma once

#include "rad/dataset.hpp"
#include "rad/rowtree.hpp"
#include "rad/rule.hpp"
#include "rad/statvec.hpp"

#include <cstdint>
#include <vector>

namespace rad {

class ADTree;

// Dense datacube of sumstats over a sorted attribute list. Cells are laid
// out mixed-radix with the LAST attribute fastest, so the first attribute
// indexes contiguous blocks — step 6 of the BuildDC recursion is plain block
// concatenation.
struct DataCube {
    std::vector<int> attrs;
    std::vector<std::int32_t> arities; // parallel to attrs
    std::size_t dim = 0;
    std::vector<double> cells; // n_cells() * dim

    std::size_t n_cells() const { return dim ? cells.size() / dim : 0; }
    double* cell(std::size_t i) { return cells.data() + i * dim; }
    const double* cell(std::size_t i) const { return cells.data() + i * dim; }

    // Mixed-radix decode of a flat cell index into per-attribute value codes.
    std::vector<std::int32_t> values_of_cell(std::size_t i) const;
};

// All-zero cube over `attrs` (sorted, distinct).
DataCube make_cube(const Dataset& ds, std::size_t dim, const std::vector<int>& attrs);

// One pass over `rows`, adding each row's statvec to its cell.
DataCube scan_cube(const Dataset& ds, const StatVecSpec& spec, const std::vector<int>& attrs,
                   const std::vector<std::int32_t>& rows);
// Same, from a materialized stat matrix (used by the searchers).
DataCube scan_cube(const Dataset& ds, const StatMatrix& mat, const std::vector<int>& attrs,
                   const std::vector<std::int32_t>& rows);

// Direct per-row rule evaluation; the oracle everything else is tested
// against.
std::vector<double> scan_rule(const Dataset& ds, const StatVecSpec& spec, const Rule& ru,
                              const std::vector<std::int32_t>& rows);
std::vector<double> scan_rule(const Dataset& ds, const StatMatrix& mat, const Rule& ru,
                              const std::vector<std::int32_t>& rows);

// BuildDC: the conditional cube DC(attrs | node's rule), recursing over
// non-MCV rowtree children and reconstructing the MCV block by cellwise
// subtraction from an AD-tree query.
DataCube build_dc(const std::vector<int>& attrs, ADTree& ad, const RowTreeNode& node,
                  const Rule& condition, const Dataset& ds, std::size_t dim);

// Whole-tree convenience: cube over rt's full attribute list from its root.
DataCube build_dc(const RowTree& rt, ADTree& ad);

} // namespace rad
