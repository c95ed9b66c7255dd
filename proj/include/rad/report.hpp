#pragma once

#include "rad/dataset.hpp"
#include "rad/learners.hpp"
#include "rad/score.hpp"
#include "rad/search.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rad {

// Bumped whenever the structured layout changes; scripts pin against it.
inline constexpr const char* kReportFormat = "radsearch-report/1";

enum class OutputFormat { Text, Tsv, Json };

OutputFormat format_from_name(const std::string& name); // text|tsv|json
std::string format_name(OutputFormat f);

// One run's full output in all three shapes. The JSON document carries the
// format tag plus the echoed config, so a report alone reproduces the run.
struct RunReport {
    nlohmann::json doc;
    std::string text;
    std::string tsv;

    std::string rendered(OutputFormat f) const;
};

// Shared renderers. Timing always sits on its own line/key spelled
// "*_seconds" so consumers can strip it when comparing runs.
nlohmann::json stats_json(const SearchStats& st);
std::string stats_text(const SearchStats& st);

nlohmann::json rules_json(const Dataset& ds, ScoreKind kind, const StatVecSpec& spec,
                          const std::vector<ScoredRule>& rules);
std::string rules_text(const Dataset& ds, ScoreKind kind, const std::vector<ScoredRule>& rules);
std::string rules_tsv(const Dataset& ds, ScoreKind kind, const StatVecSpec& spec,
                      const std::vector<ScoredRule>& rules);

nlohmann::json dlist_json(const Dataset& ds, const DecisionList& m);
nlohmann::json reglist_json(const Dataset& ds, const RegressionList& m);
nlohmann::json radreg_json(const Dataset& ds, const AdditiveRuleModel& m);

std::string format_double(double v);   // %.17g, round-trip safe
std::string format_score(double v);    // %.6g for human text

} // namespace rad
