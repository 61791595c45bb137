#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ainfty/characterizations.hpp"
#include "ainfty/search.hpp"
#include "ainfty/verifier.hpp"

namespace ainfty {

inline constexpr std::string_view kReportSchema = "ainfty-report/1";
inline constexpr std::string_view kSearchSchema = "ainfty-search/1";

/// JSON object for one weight's report. Parameterized constants serialize
/// as param -> value maps ("ap": {"2": 1.333...}); the attaining atoms live
/// in a parallel "witnesses" object keyed "name" or "name:param", and
/// "values" carries the normalized leaf values, so the whole report can be
/// re-evaluated from the document alone. Non-finite numbers become null.
nlohmann::json report_to_json(const ConstantReport& report,
                              std::span<const double> values);

struct ParsedReport {
  ConstantReport report;
  std::vector<double> values;
};

/// Inverse of report_to_json. Null values parse as NaN.
ParsedReport report_from_json(const nlohmann::json& doc);

/// One verifier outcome as a single JSON object (one line of JSON-lines).
nlohmann::json check_to_json(const CheckResult& result);

/// Search outcome together with the spec that produced it. The report is
/// null when no feasible point was seen.
nlohmann::json search_result_to_json(const SearchSpec& spec,
                                     const SearchResult& result);

/// Depth scan document: the template spec plus one entry per depth.
nlohmann::json gap_scan_to_json(const SearchSpec& spec_template,
                                std::span<const GapEntry> entries);

// CSV emitters. Each returns a complete block with a header row; numbers
// use shortest round-trip formatting and fields are quoted when needed.

/// weight,characterization,param,value,level,atom rows, one per reported
/// constant, grids in ascending parameter order.
std::string reports_to_csv(std::span<const ConstantReport> reports);

/// iteration,best_objective rows of the annealing trace.
std::string trace_to_csv(const SearchResult& result);

/// depth,seed,feasible,objective summary of a depth scan.
std::string gap_scan_to_csv(std::span<const GapEntry> entries);

/// Plot-ready sections separated by blank lines, each with its own header:
/// the concentration profile of every atom, the mass-below-threshold curve
/// delta(gamma), the power-mean curve asw(s) closed with its s -> 1 limit,
/// and the alambda breakpoint table at the attaining atom for each beta.
std::string profile_to_csv(const Filtration& f, const Weight& w,
                           const GridConfig& grids);

}  // namespace ainfty
