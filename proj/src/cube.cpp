#include "rad/cube.hpp"
#include "rad/adtree.hpp"
#include "rad/errors.hpp"
#include "rad/kernels.hpp"

namespace rad {

std::vector<std::int32_t> DataCube::values_of_cell(std::size_t i) const {
    std::vector<std::int32_t> values(attrs.size());
    for (std::size_t j = attrs.size(); j-- > 0;) {
        values[j] = std::int32_t(i % std::size_t(arities[j]));
        i /= std::size_t(arities[j]);
    }
    return values;
}

DataCube make_cube(const Dataset& ds, std::size_t dim, const std::vector<int>& attrs) {
    for (std::size_t i = 0; i + 1 < attrs.size(); ++i)
        if (attrs[i] >= attrs[i + 1])
            throw ContractViolation("cube: attribute list must be sorted and distinct");
    DataCube cube;
    cube.attrs = attrs;
    cube.dim = dim;
    std::size_t n = 1;
    for (int a : attrs) {
        cube.arities.push_back(ds.arity(a));
        n *= std::size_t(ds.arity(a));
    }
    cube.cells.assign(n * dim, 0.0);
    return cube;
}

DataCube scan_cube(const Dataset& ds, const StatMatrix& mat, const std::vector<int>& attrs,
                   const std::vector<std::int32_t>& rows) {
    DataCube cube = make_cube(ds, mat.dim, attrs);
    for (std::int32_t r : rows) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < attrs.size(); ++j)
            idx = idx * std::size_t(cube.arities[j]) +
                  std::size_t(ds.columns[std::size_t(attrs[j])][std::size_t(r)]);
        kernels::active().add(cube.cell(idx), mat.row(std::size_t(r)), mat.dim);
    }
    return cube;
}

DataCube scan_cube(const Dataset& ds, const StatVecSpec& spec, const std::vector<int>& attrs,
                   const std::vector<std::int32_t>& rows) {
    DataCube cube = make_cube(ds, spec.dim(), attrs);
    std::vector<double> sv(spec.dim());
    for (std::int32_t r : rows) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < attrs.size(); ++j)
            idx = idx * std::size_t(cube.arities[j]) +
                  std::size_t(ds.columns[std::size_t(attrs[j])][std::size_t(r)]);
        spec.eval_row(ds, std::size_t(r), sv.data());
        kernels::active().add(cube.cell(idx), sv.data(), spec.dim());
    }
    return cube;
}

std::vector<double> scan_rule(const Dataset& ds, const StatVecSpec& spec, const Rule& ru,
                              const std::vector<std::int32_t>& rows) {
    std::vector<double> out(spec.dim(), 0.0);
    std::vector<double> sv(spec.dim());
    for (std::int32_t r : rows) {
        if (!ru.matches(ds, std::size_t(r))) continue;
        spec.eval_row(ds, std::size_t(r), sv.data());
        kernels::active().add(out.data(), sv.data(), spec.dim());
    }
    return out;
}

std::vector<double> scan_rule(const Dataset& ds, const StatMatrix& mat, const Rule& ru,
                              const std::vector<std::int32_t>& rows) {
    std::vector<double> out(mat.dim, 0.0);
    for (std::int32_t r : rows) {
        if (!ru.matches(ds, std::size_t(r))) continue;
        kernels::active().add(out.data(), mat.row(std::size_t(r)), mat.dim);
    }
    return out;
}

// Steps of the recursion, per conditional cube:
//   1. no attributes left: single cell, the node's own sumstats.
//   2. the node tells us the split attribute's conditional MCV.
//   3. recurse into every stored (non-MCV) child for its value's sub-cube.
//   4. the all-values cube over the remaining attributes comes from the
//      AD-tree.
//   5. the MCV value's sub-cube is the all-values cube minus every non-MCV
//      sub-cube, cellwise.
//   6. the result is the per-value sub-cubes concatenated in value order
//      (first attribute is the slowest-varying index).
DataCube build_dc(const std::vector<int>& attrs, ADTree& ad, const RowTreeNode& node,
                  const Rule& condition, const Dataset& ds, std::size_t dim) {
    if (node.rows.empty()) return make_cube(ds, dim, attrs); // nothing below: all zero

    if (attrs.empty()) { // step 1
        DataCube cube = make_cube(ds, dim, attrs);
        kernels::active().add(cube.cell(0), node.stats.data(), dim);
        return cube;
    }

    int a1 = attrs.front();
    if (node.split_attribute != a1)
        throw ContractViolation("build_dc: rowtree split does not match the attribute list");
    std::int32_t arity = std::int32_t(ds.arity(a1));
    std::vector<int> rest(attrs.begin() + 1, attrs.end());

    // step 3
    std::vector<DataCube> sub(static_cast<std::size_t>(arity));
    for (std::int32_t v = 0; v < arity; ++v) {
        if (v == node.mcv) continue;
        if (node.children[std::size_t(v)]) {
            Rule cond = condition;
            cond.literals.emplace_back(a1, v);
            sub[std::size_t(v)] =
                build_dc(rest, ad, *node.children[std::size_t(v)], cond, ds, dim);
        } else {
            sub[std::size_t(v)] = make_cube(ds, dim, rest);
        }
    }

    // steps 4 + 5
    DataCube mcv_cube = ad.query_cube(rest, condition);
    for (std::int32_t v = 0; v < arity; ++v) {
        if (v == node.mcv) continue;
        kernels::active().sub_inplace(mcv_cube.cells.data(), sub[std::size_t(v)].cells.data(),
                                      mcv_cube.cells.size());
    }
    sub[std::size_t(node.mcv)] = std::move(mcv_cube);

    // step 6
    DataCube out = make_cube(ds, dim, attrs);
    std::size_t block = sub[0].cells.size();
    for (std::int32_t v = 0; v < arity; ++v)
        std::copy(sub[std::size_t(v)].cells.begin(), sub[std::size_t(v)].cells.end(),
                  out.cells.begin() + std::size_t(v) * block);
    return out;
}

DataCube build_dc(const RowTree& rt, ADTree& ad) {
    return build_dc(rt.attributes(), ad, rt.root(), Rule{}, rt.dataset(), rt.dim());
}

} // namespace rad
