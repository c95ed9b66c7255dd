#include "rad/dataset.hpp"
#include "rad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace rad {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

ColumnRole parse_role(const std::string& word, int& bins) {
    bins = 0;
    if (word == "cat") return ColumnRole::Categorical;
    if (word == "num") return ColumnRole::NumericTarget;
    if (word == "ignore") return ColumnRole::Ignore;
    auto colon = word.find(':');
    if (colon != std::string::npos) {
        std::string head = word.substr(0, colon);
        std::string tail = word.substr(colon + 1);
        try {
            std::size_t used = 0;
            bins = std::stoi(tail, &used);
            if (used != tail.size()) throw std::invalid_argument(tail);
        } catch (const std::exception&) {
            throw ConfigError("schema: bad bin count in '" + word + "'");
        }
        if (bins < 1) throw ConfigError("schema: bin count must be >= 1 in '" + word + "'");
        if (head == "binw") return ColumnRole::BinnedWidth;
        if (head == "binf") return ColumnRole::BinnedFrequency;
    }
    throw ConfigError("schema: unknown role '" + word + "'");
}

// One RFC-4180 record starting at `pos`; quoted fields may contain commas,
// doubled quotes, and newlines. Advances pos past the record's terminator.
bool read_record(const std::string& text, std::size_t& pos, std::vector<std::string>& out) {
    out.clear();
    if (pos >= text.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool started = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                field += c;
                ++pos;
            }
            continue;
        }
        if (c == '"' && field.empty() && !started) {
            in_quotes = true;
            started = true;
            ++pos;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
            started = false;
            ++pos;
        } else if (c == '\n' || c == '\r') {
            ++pos;
            if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
            out.push_back(field);
            return true;
        } else {
            field += c;
            started = true;
            ++pos;
        }
    }
    out.push_back(field);
    return true;
}

double parse_double(const std::string& s, const std::string& col, std::size_t row1) {
    std::string t = trim(s);
    if (t.empty())
        throw ConfigError("missing numeric value in column '" + col + "' at data row " +
                          std::to_string(row1));
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + t + "' in column '" + col + "' at data row " +
                          std::to_string(row1));
    }
}

std::string format_edge(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Bin labels carry their edges: "[lo,hi)" with the last bin closed "[lo,hi]".
std::vector<std::string> edge_labels(const std::vector<double>& edges) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        bool last = i + 2 == edges.size();
        labels.push_back("[" + format_edge(edges[i]) + "," + format_edge(edges[i + 1]) +
                         (last ? "]" : ")"));
    }
    return labels;
}

std::int32_t bin_of(double v, const std::vector<double>& edges) {
    // edges.size() >= 2; bins are [e0,e1), ..., [e_{K-1}, e_K]
    std::size_t k = edges.size() - 2;
    for (std::size_t i = 0; i + 2 < edges.size(); ++i)
        if (v < edges[i + 1]) { k = i; break; }
    return std::int32_t(k);
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_escape(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

Schema Schema::parse(const std::string& text) {
    Schema schema;
    std::stringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        group = trim(group);
        if (group.empty()) continue;
        std::size_t sp = group.find_last_of(" \t");
        if (sp == std::string::npos)
            throw ConfigError("schema: group '" + group + "' lacks a role keyword");
        std::string names = trim(group.substr(0, sp));
        std::string role_word = trim(group.substr(sp + 1));
        int bins = 0;
        ColumnRole role = parse_role(role_word, bins);
        std::stringstream ns(names);
        std::string name;
        while (std::getline(ns, name, ',')) {
            name = trim(name);
            if (name.empty()) throw ConfigError("schema: empty column name in '" + group + "'");
            if (schema.find(name))
                throw ConfigError("schema: column '" + name + "' declared twice");
            schema.columns.push_back({name, role, bins});
        }
    }
    if (schema.columns.empty()) throw ConfigError("schema: no columns declared");
    return schema;
}

const ColumnSpec* Schema::find(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<int> Dataset::arities() const {
    std::vector<int> a;
    a.reserve(levels.size());
    for (const auto& l : levels) a.push_back(int(l.size()));
    return a;
}

int Dataset::attribute_index(const std::string& name) const {
    for (std::size_t i = 0; i < attribute_names.size(); ++i)
        if (attribute_names[i] == name) return int(i);
    return -1;
}

int Dataset::target_index(const std::string& name) const {
    for (std::size_t i = 0; i < target_names.size(); ++i)
        if (target_names[i] == name) return int(i);
    return -1;
}

Dataset Dataset::with_target(const std::string& name, std::vector<double> values) const {
    if (values.size() != n_rows())
        throw ContractViolation("with_target: value count does not match row count");
    Dataset out = *this;
    int t = out.target_index(name);
    if (t >= 0) {
        out.targets[std::size_t(t)] = std::move(values);
    } else {
        out.target_names.push_back(name);
        out.targets.push_back(std::move(values));
    }
    return out;
}

void Dataset::validate() const {
    if (attribute_names.size() != columns.size() || attribute_names.size() != levels.size())
        throw ContractViolation("dataset: attribute name/level/column count mismatch");
    if (target_names.size() != targets.size())
        throw ContractViolation("dataset: target name/array count mismatch");
    std::size_t r = n_rows();
    for (std::size_t m = 0; m < columns.size(); ++m) {
        if (columns[m].size() != r)
            throw ContractViolation("dataset: column '" + attribute_names[m] + "' length mismatch");
        if (levels[m].empty())
            throw ContractViolation("dataset: attribute '" + attribute_names[m] + "' has arity 0");
        auto arity = std::int32_t(levels[m].size());
        for (std::int32_t code : columns[m])
            if (code < 0 || code >= arity)
                throw ContractViolation("dataset: code out of range in '" + attribute_names[m] + "'");
    }
    for (std::size_t t = 0; t < targets.size(); ++t)
        if (targets[t].size() != r)
            throw ContractViolation("dataset: target '" + target_names[t] + "' length mismatch");
    std::unordered_map<std::string, int> seen;
    for (const auto& n : attribute_names)
        if (++seen[n] > 1) throw ContractViolation("dataset: duplicate attribute name '" + n + "'");
    for (const auto& n : target_names)
        if (++seen[n] > 1) throw ContractViolation("dataset: duplicate/clashing target name '" + n + "'");
}

Dataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::vector<std::string> header;
    if (!read_record(text, pos, header) || (header.size() == 1 && trim(header[0]).empty()))
        throw ConfigError("empty input file: " + path);
    for (auto& h : header) h = trim(h);

    std::vector<const ColumnSpec*> roles(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        roles[c] = schema.find(header[c]);
        if (!roles[c])
            throw ConfigError("column '" + header[c] + "' not declared in schema");
    }
    for (const auto& spec : schema.columns) {
        if (std::find(header.begin(), header.end(), spec.name) == header.end())
            throw ConfigError("schema column '" + spec.name + "' missing from file header");
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> rec;
    while (read_record(text, pos, rec)) {
        if (rec.size() == 1 && rec[0].empty()) continue; // trailing blank line
        if (rec.size() != header.size())
            throw ConfigError("row " + std::to_string(rows.size() + 1) + " has " +
                              std::to_string(rec.size()) + " fields, expected " +
                              std::to_string(header.size()));
        rows.push_back(rec);
    }

    Dataset ds;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const ColumnSpec& spec = *roles[c];
        switch (spec.role) {
        case ColumnRole::Ignore:
            break;
        case ColumnRole::Categorical: {
            ds.attribute_names.push_back(spec.name);
            std::vector<std::string> lv;
            std::unordered_map<std::string, std::int32_t> code_of;
            std::vector<std::int32_t> col;
            col.reserve(rows.size());
            for (const auto& row : rows) {
                std::string cell = row[c];
                if (trim(cell).empty()) cell = "<NA>";
                auto it = code_of.find(cell);
                if (it == code_of.end()) {
                    it = code_of.emplace(cell, std::int32_t(lv.size())).first;
                    lv.push_back(cell);
                }
                col.push_back(it->second);
            }
            if (lv.empty()) lv.push_back("<NA>"); // R=0: keep arity >= 1
            ds.levels.push_back(std::move(lv));
            ds.columns.push_back(std::move(col));
            break;
        }
        case ColumnRole::NumericTarget: {
            ds.target_names.push_back(spec.name);
            std::vector<double> vals;
            vals.reserve(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r)
                vals.push_back(parse_double(rows[r][c], spec.name, r + 1));
            ds.targets.push_back(std::move(vals));
            break;
        }
        case ColumnRole::BinnedWidth:
        case ColumnRole::BinnedFrequency: {
            std::vector<double> vals;
            vals.reserve(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r)
                vals.push_back(parse_double(rows[r][c], spec.name, r + 1));

            std::vector<double> edges;
            if (vals.empty()) {
                edges = {0.0, 1.0};
            } else if (spec.role == ColumnRole::BinnedWidth) {
                double lo = *std::min_element(vals.begin(), vals.end());
                double hi = *std::max_element(vals.begin(), vals.end());
                if (lo == hi) hi = lo + 1.0; // constant column: one real bin
                edges.push_back(lo);
                for (int i = 1; i < spec.bins; ++i)
                    edges.push_back(lo + (hi - lo) * double(i) / double(spec.bins));
                edges.push_back(hi);
            } else {
                // Equal frequency: cut midway between the order statistics at
                // each quantile boundary; duplicate cuts collapse (arity may
                // come out below the requested bin count on heavy ties).
                std::vector<double> sorted = vals;
                std::sort(sorted.begin(), sorted.end());
                edges.push_back(sorted.front());
                for (int i = 1; i < spec.bins; ++i) {
                    std::size_t j = sorted.size() * std::size_t(i) / std::size_t(spec.bins);
                    if (j == 0 || j >= sorted.size()) continue;
                    double cut = (sorted[j - 1] + sorted[j]) / 2.0;
                    if (cut > edges.back()) edges.push_back(cut);
                }
                double hi = sorted.back();
                if (hi <= edges.back()) edges.push_back(edges.back() + 1.0);
                else edges.push_back(hi);
            }

            ds.attribute_names.push_back(spec.name);
            ds.levels.push_back(edge_labels(edges));
            std::vector<std::int32_t> col;
            col.reserve(vals.size());
            for (double v : vals) col.push_back(bin_of(v, edges));
            ds.columns.push_back(std::move(col));
            break;
        }
        }
    }

    ds.validate();
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    bool first = true;
    for (const auto& n : ds.attribute_names) {
        if (!first) out << ',';
        out << csv_escape(n);
        first = false;
    }
    for (const auto& n : ds.target_names) {
        if (!first) out << ',';
        out << csv_escape(n);
        first = false;
    }
    out << '\n';
    char buf[64];
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        first = true;
        for (std::size_t m = 0; m < ds.columns.size(); ++m) {
            if (!first) out << ',';
            out << csv_escape(ds.levels[m][std::size_t(ds.columns[m][r])]);
            first = false;
        }
        for (const auto& t : ds.targets) {
            if (!first) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", t[r]);
            out << buf;
            first = false;
        }
        out << '\n';
    }
    if (!out) throw RuntimeError("write failed: " + path);
}

} // namespace rad
