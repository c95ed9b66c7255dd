#include "rad/statvec.hpp"
#include "rad/errors.hpp"

namespace rad {

StatVecSpec::StatVecSpec(const Dataset& ds, std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("statvec: empty component list");
    for (const auto& c : components_) {
        switch (c.kind) {
        case Kind::ConstantOne:
            expanded_.push_back({Kind::ConstantOne, -1, -1, -1});
            labels_.push_back("1");
            break;
        case Kind::Indicator: {
            int a = ds.attribute_index(c.attribute);
            if (a < 0) throw ConfigError("statvec: unknown attribute '" + c.attribute + "'");
            if (c.value < 0 || c.value >= ds.arity(a))
                throw ConfigError("statvec: value out of range for attribute '" + c.attribute + "'");
            expanded_.push_back({Kind::Indicator, a, c.value, -1});
            labels_.push_back("I(" + c.attribute + "=" + ds.levels[std::size_t(a)][std::size_t(c.value)] + ")");
            break;
        }
        case Kind::OneHot: {
            int a = ds.attribute_index(c.attribute);
            if (a < 0) throw ConfigError("statvec: unknown attribute '" + c.attribute + "'");
            for (std::int32_t v = 0; v < ds.arity(a); ++v) {
                expanded_.push_back({Kind::Indicator, a, v, -1});
                labels_.push_back("I(" + c.attribute + "=" + ds.levels[std::size_t(a)][std::size_t(v)] + ")");
            }
            break;
        }
        case Kind::Target: {
            int t = ds.target_index(c.target);
            if (t < 0) throw ConfigError("statvec: unknown target '" + c.target + "'");
            expanded_.push_back({Kind::Target, -1, -1, t});
            labels_.push_back(c.target);
            break;
        }
        case Kind::TargetSquared: {
            int t = ds.target_index(c.target);
            if (t < 0) throw ConfigError("statvec: unknown target '" + c.target + "'");
            expanded_.push_back({Kind::TargetSquared, -1, -1, t});
            labels_.push_back(c.target + "^2");
            break;
        }
        }
    }
    if (components_[0].kind == Kind::ConstantOne) leading_count_ = 1;
    else if (components_[0].kind == Kind::OneHot)
        leading_count_ = std::size_t(ds.arity(ds.attribute_index(components_[0].attribute)));
    for (const auto& e : expanded_)
        if (e.kind == Kind::Target && first_target_ < 0) first_target_ = e.target;
}

void StatVecSpec::eval_row(const Dataset& ds, std::size_t row, double* out) const {
    for (std::size_t j = 0; j < expanded_.size(); ++j) {
        const Expanded& e = expanded_[j];
        switch (e.kind) {
        case Kind::ConstantOne:
            out[j] = 1.0;
            break;
        case Kind::Indicator:
            out[j] = ds.columns[std::size_t(e.attribute)][row] == e.value ? 1.0 : 0.0;
            break;
        case Kind::Target:
            out[j] = ds.targets[std::size_t(e.target)][row];
            break;
        case Kind::TargetSquared: {
            double v = ds.targets[std::size_t(e.target)][row];
            out[j] = v * v;
            break;
        }
        case Kind::OneHot: // expanded away in the constructor
            break;
        }
    }
}

StatVecSpec StatVecSpec::count_only(const Dataset& ds) {
    return StatVecSpec(ds, {{Kind::ConstantOne, "", -1, ""}});
}

StatVecSpec StatVecSpec::count_and_target(const Dataset& ds, const std::string& target) {
    return StatVecSpec(ds, {{Kind::ConstantOne, "", -1, ""}, {Kind::Target, "", -1, target}});
}

StatVecSpec StatVecSpec::count_target_square(const Dataset& ds, const std::string& target) {
    return StatVecSpec(ds, {{Kind::ConstantOne, "", -1, ""},
                            {Kind::Target, "", -1, target},
                            {Kind::TargetSquared, "", -1, target}});
}

StatVecSpec StatVecSpec::one_hot(const Dataset& ds, const std::string& attribute) {
    return StatVecSpec(ds, {{Kind::OneHot, attribute, -1, ""}});
}

std::vector<double> eval_statvec(const Dataset& ds, const StatVecSpec& spec, std::size_t row) {
    if (row >= ds.n_rows()) throw ContractViolation("eval_statvec: row out of range");
    std::vector<double> out(spec.dim());
    spec.eval_row(ds, row, out.data());
    return out;
}

StatMatrix materialize(const Dataset& ds, const StatVecSpec& spec) {
    StatMatrix m;
    m.rows = ds.n_rows();
    m.dim = spec.dim();
    m.data.resize(m.rows * m.dim);
    for (std::size_t r = 0; r < m.rows; ++r) spec.eval_row(ds, r, m.data.data() + r * m.dim);
    return m;
}

} // namespace rad
