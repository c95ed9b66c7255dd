#include "rad/report.hpp"
#include "rad/errors.hpp"

#include <cmath>
#include <cstdio>

namespace rad {

namespace {

nlohmann::json literals_json(const Dataset& ds, const Rule& r) {
    nlohmann::json lits = nlohmann::json::array();
    for (auto [a, v] : r.literals)
        lits.push_back({{"attribute", ds.attribute_names[std::size_t(a)]},
                        {"value", ds.levels[std::size_t(a)][std::size_t(v)]}});
    return lits;
}

std::string format_count(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    return format_double(v);
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

OutputFormat format_from_name(const std::string& name) {
    if (name == "text") return OutputFormat::Text;
    if (name == "tsv") return OutputFormat::Tsv;
    if (name == "json") return OutputFormat::Json;
    throw ConfigError("unknown output format '" + name + "' (expected text, tsv, or json)");
}

std::string format_name(OutputFormat f) {
    switch (f) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Tsv: return "tsv";
    case OutputFormat::Json: return "json";
    }
    throw ContractViolation("unreachable format");
}

std::string RunReport::rendered(OutputFormat f) const {
    switch (f) {
    case OutputFormat::Text: return text;
    case OutputFormat::Tsv: return tsv;
    case OutputFormat::Json: return doc.dump(2) + "\n";
    }
    throw ContractViolation("unreachable format");
}

nlohmann::json stats_json(const SearchStats& st) {
    nlohmann::json j{{"rules_scored", st.rules_scored},
                     {"cubes_evaluated", st.cubes_evaluated},
                     {"rowtrees_built", st.rowtrees_built},
                     {"tweaks_per_level", st.tweaks_per_level},
                     {"adtree_nodes", st.adtree_nodes},
                     {"adtree_nodes_per_depth", st.adtree_nodes_per_depth},
                     {"tables_pruned", st.tables_pruned},
                     {"elapsed_seconds", st.elapsed_seconds}};
    if (st.lambda_hat) j["lambda_hat"] = *st.lambda_hat;
    return j;
}

std::string stats_text(const SearchStats& st) {
    std::string out;
    out += "rules_scored: " + std::to_string(st.rules_scored) + "\n";
    out += "cubes_evaluated: " + std::to_string(st.cubes_evaluated) + "\n";
    out += "rowtrees_built: " + std::to_string(st.rowtrees_built) + "\n";
    out += "tweaks_per_level: [";
    for (std::size_t i = 0; i < st.tweaks_per_level.size(); ++i)
        out += (i ? ", " : "") + std::to_string(st.tweaks_per_level[i]);
    out += "]\n";
    out += "adtree_nodes: " + std::to_string(st.adtree_nodes) + "\n";
    out += "adtree_nodes_per_depth: [";
    for (std::size_t i = 0; i < st.adtree_nodes_per_depth.size(); ++i)
        out += (i ? ", " : "") + std::to_string(st.adtree_nodes_per_depth[i]);
    out += "]\n";
    out += "tables_pruned: " + std::to_string(st.tables_pruned) + "\n";
    if (st.lambda_hat) out += "lambda_hat: " + format_score(*st.lambda_hat) + "\n";
    out += "elapsed_seconds: " + format_score(st.elapsed_seconds) + "\n";
    return out;
}

nlohmann::json rules_json(const Dataset& ds, ScoreKind kind, const StatVecSpec& spec,
                          const std::vector<ScoredRule>& rules) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const ScoredRule& r = rules[i];
        arr.push_back({{"rank", i + 1},
                       {"rule", r.rule.to_string(ds)},
                       {"literals", literals_json(ds, r.rule)},
                       {"score", r.score},
                       {"matches", match_count(kind, r.stats)},
                       {"sumstats", r.stats},
                       {"stat_labels", spec.labels()}});
    }
    return arr;
}

std::string rules_text(const Dataset& ds, ScoreKind kind,
                       const std::vector<ScoredRule>& rules) {
    if (rules.empty()) return "no rules met the support threshold\n";
    std::string out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const ScoredRule& r = rules[i];
        out += std::to_string(i + 1) + ". score=" + format_score(r.score) +
               " matches=" + format_count(match_count(kind, r.stats)) + "  " +
               r.rule.to_string(ds) + "\n";
    }
    return out;
}

std::string rules_tsv(const Dataset& ds, ScoreKind kind, const StatVecSpec& spec,
                      const std::vector<ScoredRule>& rules) {
    std::string out = "rank\tscore\tmatches\trule";
    for (const std::string& l : spec.labels()) out += "\tstat:" + l;
    out += "\n";
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const ScoredRule& r = rules[i];
        out += std::to_string(i + 1) + "\t" + format_double(r.score) + "\t" +
               format_count(match_count(kind, r.stats)) + "\t" + r.rule.to_string(ds);
        for (double s : r.stats) out += "\t" + format_double(s);
        out += "\n";
    }
    return out;
}

nlohmann::json dlist_json(const Dataset& ds, const DecisionList& m) {
    nlohmann::json entries = nlohmann::json::array();
    const auto& levels = ds.levels[std::size_t(m.output_attribute)];
    for (const auto& e : m.entries)
        entries.push_back({{"rule", e.rule.to_string(ds)},
                           {"literals", literals_json(ds, e.rule)},
                           {"label", levels[std::size_t(e.label)]},
                           {"distribution", e.distribution}});
    return {{"model", "dlist"},
            {"output_attribute", ds.attribute_names[std::size_t(m.output_attribute)]},
            {"entries", entries},
            {"default_label", levels[std::size_t(m.default_label)]}};
}

nlohmann::json reglist_json(const Dataset& ds, const RegressionList& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : m.entries)
        entries.push_back({{"rule", e.rule.to_string(ds)},
                           {"literals", literals_json(ds, e.rule)},
                           {"value", e.value}});
    return {{"model", "reglist"},
            {"target", m.target},
            {"entries", entries},
            {"default_value", m.default_value}};
}

nlohmann::json radreg_json(const Dataset& ds, const AdditiveRuleModel& m) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : m.terms)
        terms.push_back({{"rule", t.rule.to_string(ds)},
                         {"literals", literals_json(ds, t.rule)},
                         {"coefficient", t.coefficient}});
    return {{"model", "radreg"},
            {"target", m.target},
            {"intercept", m.intercept},
            {"terms", terms},
            {"stopped_on_collinearity", m.stopped_on_collinearity}};
}

} // namespace rad
