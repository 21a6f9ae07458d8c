#include "churn/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace churn {

std::size_t CleaningReport::total_rejected() const {
  std::size_t n = 0;
  for (const auto &[_, c] : rejections) n += c;
  return n;
}

void CleaningReport::merge(const CleaningReport &other) {
  rows_read += other.rows_read;
  rows_accepted += other.rows_accepted;
  duplicates_collapsed += other.duplicates_collapsed;
  clone_agents_removed += other.clone_agents_removed;
  for (const auto &[k, v] : other.rejections) rejections[k] += v;
  for (const auto &[k, v] : other.clone_sets) {
    auto &dst = clone_sets[k];
    dst.insert(dst.end(), v.begin(), v.end());
  }
}

static std::vector<std::string> split_csv_row(const std::string &line) {
  // RFC 4180 without quoting: the log schema has no commas in fields.
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

static bool parse_row(const std::string &line, LogFormat format, RawRecord &raw) {
  if (format == LogFormat::csv) {
    auto fields = split_csv_row(line);
    if (fields.size() != 3) return false;
    raw = {fields[0], fields[1], fields[2]};
    return true;
  }
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  if (!j.contains("agent_id") || !j.contains("timestamp") || !j.contains("ip"))
    return false;
  raw.agent_id = j["agent_id"].is_string() ? j["agent_id"].get<std::string>() : "";
  if (j["timestamp"].is_string())
    raw.timestamp = j["timestamp"].get<std::string>();
  else if (j["timestamp"].is_number_integer())
    raw.timestamp = std::to_string(j["timestamp"].get<std::int64_t>());
  else
    return false;
  raw.ip = j["ip"].is_string() ? j["ip"].get<std::string>() : "";
  return true;
}

IngestResult parse_log(std::istream &in, LogFormat format,
                       const AnalysisConfig &cfg) {
  IngestResult res;
  std::map<std::string, std::vector<AccessRecord>> by_agent;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && format == LogFormat::csv && line.rfind("agent_id", 0) == 0) {
      first = false;
      continue;  // header
    }
    first = false;
    ++res.report.rows_read;
    RawRecord raw;
    if (!parse_row(line, format, raw)) {
      ++res.report.rejections[reject_reason_name(RejectReason::bad_row)];
      continue;
    }
    auto v = validate_record(raw, cfg);
    if (!v.ok()) {
      ++res.report.rejections[reject_reason_name(v.reason)];
      continue;
    }
    ++res.report.rows_accepted;
    by_agent[v.record->agent_id].push_back(*v.record);
  }

  for (auto &[agent, records] : by_agent) {
    std::stable_sort(records.begin(), records.end(),
                     [](const AccessRecord &a, const AccessRecord &b) {
                       return a.timestamp < b.timestamp;
                     });
    std::vector<AccessRecord> dedup;
    dedup.reserve(records.size());
    for (const auto &r : records) {
      if (!dedup.empty() && dedup.back().timestamp == r.timestamp) {
        // exact duplicate row collapses; a timestamp tie with a different IP
        // keeps the first row only (the clock cannot hold two IPs at once)
        ++res.report.duplicates_collapsed;
        continue;
      }
      dedup.push_back(r);
    }
    res.traces.push_back(AgentTrace{agent, std::move(dedup)});
  }
  return res;
}

IngestResult parse_log_file(const std::string &path, LogFormat format,
                            const AnalysisConfig &cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("log: cannot open " + path);
  return parse_log(in, format, cfg);
}

LogFormat guess_format(const std::string &path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".ndjson" || ext == ".jsonl" || ext == ".json")
    return LogFormat::ndjson;
  return LogFormat::csv;
}

IngestResult remove_clones(std::vector<AgentTrace> traces) {
  IngestResult res;
  std::sort(traces.begin(), traces.end(),
            [](const AgentTrace &a, const AgentTrace &b) {
              return a.agent_id < b.agent_id;
            });
  // distinct-IP set -> representative index (first seen = smallest agent_id)
  std::map<std::set<Ipv4>, std::size_t> groups;
  std::vector<bool> keep(traces.size(), true);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    std::set<Ipv4> ips;
    for (const auto &r : traces[i].accesses) ips.insert(r.ip);
    auto [it, inserted] = groups.emplace(std::move(ips), i);
    if (!inserted) {
      keep[i] = false;
      ++res.report.clone_agents_removed;
      res.report.clone_sets[traces[it->second].agent_id].push_back(
          traces[i].agent_id);
    }
  }
  for (std::size_t i = 0; i < traces.size(); ++i)
    if (keep[i]) res.traces.push_back(std::move(traces[i]));
  return res;
}

}  // namespace churn
