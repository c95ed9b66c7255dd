#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rad {

// Column roles a schema can assign. Categorical columns become rule
// attributes directly; numeric columns either become targets or are binned
// into categorical rule attributes (numeric rule attributes require an
// explicit binning directive — no adaptive thresholds).
enum class ColumnRole { Categorical, NumericTarget, Ignore, BinnedWidth, BinnedFrequency };

struct ColumnSpec {
    std::string name;
    ColumnRole role;
    int bins = 0; // for BinnedWidth / BinnedFrequency
};

// Schema text: semicolon-separated groups, each "name[,name...] ROLE" with
// ROLE one of cat | num | ignore | binw:K | binf:K.
// Example: "A,B,C cat; y num".
struct Schema {
    std::vector<ColumnSpec> columns;

    static Schema parse(const std::string& text); // throws ConfigError
    const ColumnSpec* find(const std::string& name) const;
};

// Immutable after load; safe for concurrent read.
struct Dataset {
    std::vector<std::string> attribute_names;
    // levels[m][code] = level label; arity(m) == levels[m].size().
    std::vector<std::vector<std::string>> levels;
    // column-major codes, columns[m][r] in [0, arity(m)).
    std::vector<std::vector<std::int32_t>> columns;

    std::vector<std::string> target_names;
    std::vector<std::vector<double>> targets;

    std::size_t n_rows() const {
        if (!columns.empty()) return columns[0].size();
        if (!targets.empty()) return targets[0].size();
        return 0;
    }
    int n_attributes() const { return int(columns.size()); }
    int arity(int m) const { return int(levels[std::size_t(m)].size()); }
    std::vector<int> arities() const;

    int attribute_index(const std::string& name) const; // -1 if absent
    int target_index(const std::string& name) const;    // -1 if absent

    // Copy with one target column replaced or appended (used for residual
    // refitting; the original is untouched).
    Dataset with_target(const std::string& name, std::vector<double> values) const;

    void validate() const; // throws ContractViolation on invariant breach
};

// RFC-4180-style CSV with a required header row. Every header column must be
// declared in the schema. Throws ConfigError (bad file/schema/value) with row
// numbers where applicable.
Dataset load_csv(const std::string& path, const Schema& schema);

// Writes level labels for attributes and %.17g for targets. Reloading a
// non-binned dataset with the same schema reproduces codes, arities, and
// targets exactly.
void write_csv(const Dataset& ds, const std::string& path);

} // namespace rad
