#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "churn/model.hpp"

namespace churn {

enum class LogFormat { csv, ndjson };

struct CleaningReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::map<std::string, std::size_t> rejections;  // reason name -> count
  std::size_t duplicates_collapsed = 0;
  std::size_t clone_agents_removed = 0;
  // clone set representative -> removed agent ids
  std::map<std::string, std::vector<std::string>> clone_sets;

  std::size_t total_rejected() const;
  void merge(const CleaningReport &other);
};

struct IngestResult {
  std::vector<AgentTrace> traces;  // sorted by agent_id
  CleaningReport report;
};

// Parses an access log into per-agent traces. Per-row failures are recorded
// in the report, not fatal. Exact-duplicate (agent,timestamp,ip) rows collapse
// to one; two different IPs at the same timestamp keep the first row seen.
IngestResult parse_log(std::istream &in, LogFormat format,
                       const AnalysisConfig &cfg);
IngestResult parse_log_file(const std::string &path, LogFormat format,
                            const AnalysisConfig &cfg);

// Infers csv vs ndjson from the file extension (".ndjson"/".jsonl" vs csv).
LogFormat guess_format(const std::string &path);

// Drops all but one agent from every group whose sets of distinct IPs are
// identical; the lexicographically smallest agent_id survives.
IngestResult remove_clones(std::vector<AgentTrace> traces);

}  // namespace churn
