#pragma once

#include <string>
#include <vector>

#include "churn/pipeline.hpp"

namespace churn {

constexpr int kReportSchemaVersion = 1;
constexpr const char *kToolVersion = "0.1.0";

struct ReportInputs {
  std::string log_path;
  std::string log_digest;
  std::string as_map_path;
  std::string as_map_digest;
};

// FNV-1a 64-bit over the file bytes, hex-encoded.
std::string file_digest(const std::string &path);

// Full machine-readable report; parse(emit(r)) is the identity on the data.
std::string report_to_json(const AnalysisResult &result,
                           const AnalysisConfig &cfg,
                           const ReportInputs &inputs);

// CSV tables, RFC 4180, UTF-8, LF. Durations in hours with 2 decimals.
std::string agents_csv(const AnalysisResult &result);
std::string as_stats_csv(const AnalysisResult &result);
std::string estimates_csv(const AnalysisResult &result);
std::string as_periods_csv(const AnalysisResult &result);
std::string change_probability_csv(const AnalysisResult &result);

// Writes report.json plus one CSV per table into out_dir.
void write_report_files(const AnalysisResult &result, const AnalysisConfig &cfg,
                        const ReportInputs &inputs, const std::string &out_dir);

std::vector<std::string> plotdata_figures();

// x,y series CSV for one of the named figure shapes; throws
// std::invalid_argument listing valid names for an unknown figure.
std::string plotdata_csv(const std::string &report_json,
                         const std::string &figure);

}  // namespace churn
