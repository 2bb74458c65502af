#pragma once

#include <string>

#include <json.hpp>

#include "holoweight/bergman.hpp"
#include "holoweight/config.hpp"
#include "holoweight/verification.hpp"
#include "holoweight/weights.hpp"

namespace hw {

/// Shortest round-trip decimal form of a double (stable across runs).
std::string format_double(double v);

nlohmann::json report_to_json(const IdentityReport& r);
IdentityReport report_from_json(const nlohmann::json& j);

/// Full suite report: schema_version "1", echoed configuration (execution
/// details such as thread count and output paths are not results and are
/// omitted), per-cell results, summary counts.
nlohmann::json suite_to_json(const RunConfig& cfg, const SuiteResult& res);

/// One row per cell, 12 columns:
/// domain,k,g,eta,variant,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,pass
std::string suite_to_csv(const SuiteResult& res);

nlohmann::json smoothing_to_json(const SmoothingReport& rep);

nlohmann::json profile_to_json(const VanishingProfile& prof);

/// Writes dir/suite.json and dir/suite.csv (dir created if needed).
void emit_reports(const RunConfig& cfg, const SuiteResult& res, const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Copy of a report JSON with every per-cell "runtime_seconds" value removed;
/// this is the content that must be byte-identical across reruns and thread
/// counts (wall-clock timings are not part of the numeric results).
std::string strip_runtimes(const std::string& json_text);

}  // namespace hw
