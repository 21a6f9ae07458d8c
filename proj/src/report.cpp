#include "churn/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace churn {

using nlohmann::json;

std::string file_digest(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char out[32];
  std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

static std::string hours2(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", seconds / kHour);
  return buf;
}

static json as_or_null(AsNumber as) {
  if (as == kUnknownAs) return nullptr;
  return as;
}

static json summary_json(const DistributionSummary &d) {
  return json{{"mean", d.mean}, {"median", d.median}, {"min", d.min},
              {"max", d.max},   {"count", d.count}};
}

static const char *skip_reason_name(SkipReason r) {
  switch (r) {
    case SkipReason::none: return "none";
    case SkipReason::too_few_intervals: return "min_intervals";
    case SkipReason::too_short: return "too_short";
  }
  return "unknown";
}

std::string report_to_json(const AnalysisResult &r, const AnalysisConfig &cfg,
                           const ReportInputs &inputs) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["config"] = {
      {"gap_seconds", cfg.gap_threshold},
      {"sample_seconds", cfg.sampling_period},
      {"min_intervals", cfg.min_intervals_per_window},
      {"xi_thresholds", cfg.xi_thresholds},
      {"window_start", cfg.window_start},
      {"window_end", cfg.window_end},
  };
  j["inputs"] = {
      {"log", inputs.log_path},
      {"log_digest", inputs.log_digest},
      {"as_map", inputs.as_map_path},
      {"as_map_digest", inputs.as_map_digest},
  };
  j["cleaning"] = {
      {"rows_read", r.cleaning.rows_read},
      {"rows_accepted", r.cleaning.rows_accepted},
      {"rejections", r.cleaning.rejections},
      {"duplicates_collapsed", r.cleaning.duplicates_collapsed},
      {"clone_agents_removed", r.cleaning.clone_agents_removed},
      {"clone_sets", r.cleaning.clone_sets},
      {"zero_intervals_removed", r.zero_intervals_removed},
      {"multi_as_windows_dropped", r.multi_as_windows_dropped},
  };

  json agents = json::array();
  for (const auto &a : r.agents) {
    agents.push_back({
        {"agent_id", a.agent_id},
        {"as_number", as_or_null(a.as_number)},
        {"distinct_ip_count", a.distinct_ip_count},
        {"is_fixed", a.is_fixed},
        {"percent_online", a.percent_online},
        {"max_interval_seconds", a.max_interval},
        {"online_windows", a.online_window_count},
        {"offline_windows", a.offline_window_count},
        {"empty", a.empty},
    });
  }
  j["agents"] = agents;

  json windows = json::array();
  for (const auto &w : r.windows) {
    json ivs = json::array();
    for (const auto &iv : w.window.intervals)
      ivs.push_back({{"start", iv.start},
                     {"end", iv.end},
                     {"ip", format_ipv4(iv.ip)},
                     {"as_number", as_or_null(iv.as_number)}});
    windows.push_back({{"agent_id", w.agent_id},
                       {"window_index", w.window_index},
                       {"as_number", as_or_null(w.window.as_number)},
                       {"start", w.window.start},
                       {"end", w.window.end},
                       {"intervals", ivs}});
  }
  j["windows"] = windows;

  json offline = json::array();
  for (const auto &w : r.offline_windows)
    offline.push_back({{"agent_id", w.agent_id},
                       {"start", w.start},
                       {"end", w.end},
                       {"ip_before", format_ipv4(w.ip_before)},
                       {"ip_after", format_ipv4(w.ip_after)}});
  j["offline_windows"] = offline;

  json estimates = json::array();
  for (const auto &e : r.estimates)
    estimates.push_back({{"agent_id", e.agent_id},
                         {"as_number", as_or_null(e.as_number)},
                         {"window_index", e.window_index},
                         {"frequency_cpm", e.estimate.frequency_cpm},
                         {"period_minutes", e.estimate.period_minutes},
                         {"xi", e.estimate.xi},
                         {"interval_count", e.estimate.interval_count},
                         {"sample_count", e.estimate.sample_count},
                         {"window_length_seconds", e.estimate.window_length}});
  j["estimates"] = estimates;

  json skipped = json::array();
  for (const auto &s : r.skipped)
    skipped.push_back({{"agent_id", s.agent_id},
                       {"window_index", s.window_index},
                       {"reason", skip_reason_name(s.reason)}});
  j["skipped_windows"] = skipped;

  json as_stats = json::array();
  for (const auto &s : r.as_stats)
    as_stats.push_back({
        {"as_number", s.as_number},
        {"as_class", s.as_class},
        {"agent_count", s.agent_count},
        {"percent_fixed_agents", s.percent_fixed_agents},
        {"percent_online_all", summary_json(s.percent_online_all)},
        {"percent_online_fixed", summary_json(s.percent_online_fixed)},
        {"percent_online_non_fixed", summary_json(s.percent_online_non_fixed)},
        {"max_interval_hours_all", summary_json(s.max_interval_hours_all)},
        {"max_interval_hours_fixed", summary_json(s.max_interval_hours_fixed)},
        {"max_interval_hours_non_fixed",
         summary_json(s.max_interval_hours_non_fixed)},
    });
  j["as_stats"] = as_stats;

  json bins = json::array();
  for (const auto &b : r.change_curve.bins) {
    json jb = {{"lower_seconds", b.lower},
               {"upper_seconds", b.upper},
               {"samples", b.sample_count},
               {"changed", b.changed_count}};
    jb["probability"] = b.probability ? json(*b.probability) : json(nullptr);
    bins.push_back(std::move(jb));
  }
  j["change_probability"] = {{"bins", bins}};

  json per_ip = json::array();
  for (const auto &[ip, n] : r.occupancy.agents_per_ip)
    per_ip.push_back({{"ip", format_ipv4(ip)}, {"agents", n}});
  j["agents_per_ip"] = per_ip;
  json per_as = json::array();
  for (const auto &[as, n] : r.occupancy.agents_per_as)
    per_as.push_back({{"as_number", as}, {"agents", n}});
  j["agents_per_as"] = per_as;

  json tables = json::array();
  for (const auto &t : r.as_periods) {
    json summaries = json::array();
    for (const auto &s : t.summaries) {
      json members = json::array();
      for (const auto &a : s.agents)
        members.push_back({{"agent_id", a.agent_id},
                           {"mean_xi", a.mean_xi},
                           {"weighted_period_minutes", a.weighted_period_minutes},
                           {"windows", a.window_count}});
      summaries.push_back(
          {{"as_number", s.as_number},
           {"weighted_mean_period_minutes", s.weighted_mean_period_minutes},
           {"period_stddev_minutes", s.period_stddev_minutes},
           {"mean_xi", s.mean_xi},
           {"agent_count", s.agent_count},
           {"agents", members}});
    }
    tables.push_back({{"xi_threshold", t.xi_threshold}, {"summaries", summaries}});
  }
  j["as_periods"] = tables;

  return j.dump(2) + "\n";
}

std::string agents_csv(const AnalysisResult &r) {
  std::ostringstream os;
  os << "agent_id,as_number,distinct_ip_count,is_fixed,percent_online,"
        "max_interval_hours,online_windows,offline_windows\n";
  for (const auto &a : r.agents) {
    if (a.empty) continue;
    char pct[16];
    std::snprintf(pct, sizeof(pct), "%.4f", a.percent_online);
    os << a.agent_id << ','
       << (a.as_number == kUnknownAs ? std::string{}
                                     : std::to_string(a.as_number))
       << ',' << a.distinct_ip_count << ',' << (a.is_fixed ? 1 : 0) << ','
       << pct << ',' << hours2(static_cast<double>(a.max_interval)) << ','
       << a.online_window_count << ',' << a.offline_window_count << '\n';
  }
  return os.str();
}

std::string as_stats_csv(const AnalysisResult &r) {
  std::ostringstream os;
  os << "as_number,as_class,agent_count,percent_fixed,median_online_all,"
        "mean_online_all,median_online_fixed,median_online_non_fixed,"
        "median_max_interval_hours\n";
  for (const auto &s : r.as_stats) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.4f,%.4f,%.2f",
                  s.percent_fixed_agents, s.percent_online_all.median,
                  s.percent_online_all.mean, s.percent_online_fixed.median,
                  s.percent_online_non_fixed.median,
                  s.max_interval_hours_all.median);
    os << s.as_number << ',' << s.as_class << ',' << s.agent_count << ','
       << buf << '\n';
  }
  return os.str();
}

std::string estimates_csv(const AnalysisResult &r) {
  std::ostringstream os;
  os << "agent_id,as_number,window_index,period_hours,frequency_cpm,xi,"
        "interval_count,window_length_hours\n";
  for (const auto &e : r.estimates) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.2f,%.8g,%.4f",
                  e.estimate.period_minutes / 60.0, e.estimate.frequency_cpm,
                  e.estimate.xi);
    os << e.agent_id << ','
       << (e.as_number == kUnknownAs ? std::string{}
                                     : std::to_string(e.as_number))
       << ',' << e.window_index << ',' << buf << ','
       << e.estimate.interval_count << ','
       << hours2(static_cast<double>(e.estimate.window_length)) << '\n';
  }
  return os.str();
}

std::string as_periods_csv(const AnalysisResult &r) {
  std::ostringstream os;
  os << "xi_threshold,as_number,weighted_mean_period_hours,"
        "period_stddev_hours,mean_xi,agent_count\n";
  for (const auto &t : r.as_periods) {
    for (const auto &s : t.summaries) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.2f,%u,%.2f,%.2f,%.4f,%zu",
                    t.xi_threshold, s.as_number,
                    s.weighted_mean_period_minutes / 60.0,
                    s.period_stddev_minutes / 60.0, s.mean_xi, s.agent_count);
      os << buf << '\n';
    }
  }
  return os.str();
}

std::string change_probability_csv(const AnalysisResult &r) {
  std::ostringstream os;
  os << "lower_hours,upper_hours,samples,changed,probability\n";
  for (const auto &b : r.change_curve.bins) {
    os << hours2(static_cast<double>(b.lower)) << ','
       << hours2(static_cast<double>(b.upper)) << ',' << b.sample_count << ','
       << b.changed_count << ',';
    if (b.probability) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.4f", *b.probability);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

void write_report_files(const AnalysisResult &result, const AnalysisConfig &cfg,
                        const ReportInputs &inputs, const std::string &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string &name, const std::string &content) {
    std::ofstream os(fs::path(out_dir) / name, std::ios::binary);
    if (!os) throw std::runtime_error("report: cannot write " + name);
    os << content;
  };
  write("report.json", report_to_json(result, cfg, inputs));
  write("agents.csv", agents_csv(result));
  write("as_stats.csv", as_stats_csv(result));
  write("estimates.csv", estimates_csv(result));
  write("as_periods.csv", as_periods_csv(result));
  write("change_probability.csv", change_probability_csv(result));
}

std::vector<std::string> plotdata_figures() {
  return {
      "agents-per-ip-cdf",   "agents-per-as-cdf", "ips-per-agent-cdf",
      "fixed-agents-per-as-cdf", "percent-online-cdf", "max-interval-cdf",
      "change-probability",  "period-per-as-cdf", "period-per-as-bars",
  };
}

namespace {

std::string cdf_csv(std::vector<double> values, const std::string &xname) {
  std::sort(values.begin(), values.end());
  std::ostringstream os;
  os << xname << ",cdf\n";
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g,%.6f", values[i],
                  static_cast<double>(i + 1) / n);
    os << buf << '\n';
  }
  return os.str();
}

std::string labeled_cdf_csv(
    const std::vector<std::pair<std::string, std::vector<double>>> &series,
    const std::string &xname) {
  std::ostringstream os;
  os << "series," << xname << ",cdf\n";
  for (auto [label, values] : series) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%g,%.6f", values[i],
                    static_cast<double>(i + 1) / n);
      os << label << ',' << buf << '\n';
    }
  }
  return os.str();
}

}  // namespace

std::string plotdata_csv(const std::string &report_json,
                         const std::string &figure) {
  json j = json::parse(report_json);

  if (figure == "agents-per-ip-cdf" || figure == "agents-per-as-cdf") {
    std::vector<double> counts;
    const char *key = figure[11] == 'i' ? "agents_per_ip" : "agents_per_as";
    for (const auto &row : j.at(key))
      counts.push_back(row.at("agents").get<double>());
    return cdf_csv(std::move(counts), "agents");
  }
  if (figure == "ips-per-agent-cdf") {
    std::vector<double> v;
    for (const auto &a : j.at("agents"))
      if (!a.at("empty").get<bool>())
        v.push_back(a.at("distinct_ip_count").get<double>());
    return cdf_csv(std::move(v), "ips");
  }
  if (figure == "fixed-agents-per-as-cdf") {
    std::vector<double> v;
    for (const auto &s : j.at("as_stats"))
      v.push_back(s.at("percent_fixed_agents").get<double>());
    return cdf_csv(std::move(v), "percent_fixed");
  }
  if (figure == "percent-online-cdf" || figure == "max-interval-cdf") {
    const bool online = figure[0] == 'p';
    std::vector<double> all, fixed, non_fixed;
    for (const auto &a : j.at("agents")) {
      if (a.at("empty").get<bool>()) continue;
      double v = online
                     ? a.at("percent_online").get<double>()
                     : a.at("max_interval_seconds").get<double>() / kHour;
      all.push_back(v);
      (a.at("is_fixed").get<bool>() ? fixed : non_fixed).push_back(v);
    }
    return labeled_cdf_csv(
        {{"all", all}, {"fixed", fixed}, {"non_fixed", non_fixed}},
        online ? "percent_online" : "max_interval_hours");
  }
  if (figure == "change-probability") {
    std::ostringstream os;
    os << "offline_hours,probability,samples\n";
    for (const auto &b : j.at("change_probability").at("bins")) {
      if (b.at("probability").is_null()) continue;
      double lo = b.at("lower_seconds").get<double>() / kHour;
      double hi = b.at("upper_seconds").get<double>() / kHour;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f,%.4f,%zu", std::sqrt(lo * hi),
                    b.at("probability").get<double>(),
                    b.at("samples").get<std::size_t>());
      os << buf << '\n';
    }
    return os.str();
  }
  if (figure == "period-per-as-cdf") {
    std::ostringstream os;
    os << "xi_threshold,period_hours,cdf\n";
    for (const auto &t : j.at("as_periods")) {
      std::vector<double> v;
      for (const auto &s : t.at("summaries"))
        v.push_back(s.at("weighted_mean_period_minutes").get<double>() / 60.0);
      std::sort(v.begin(), v.end());
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%.6f",
                      t.at("xi_threshold").get<double>(), v[i],
                      static_cast<double>(i + 1) / static_cast<double>(v.size()));
        os << buf << '\n';
      }
    }
    return os.str();
  }
  if (figure == "period-per-as-bars") {
    std::ostringstream os;
    os << "xi_threshold,as_number,period_hours,stddev_hours,mean_xi,agents\n";
    for (const auto &t : j.at("as_periods")) {
      for (const auto &s : t.at("summaries")) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.2f,%u,%.2f,%.2f,%.4f,%zu",
                      t.at("xi_threshold").get<double>(),
                      s.at("as_number").get<AsNumber>(),
                      s.at("weighted_mean_period_minutes").get<double>() / 60.0,
                      s.at("period_stddev_minutes").get<double>() / 60.0,
                      s.at("mean_xi").get<double>(),
                      s.at("agent_count").get<std::size_t>());
        os << buf << '\n';
      }
    }
    return os.str();
  }

  std::string valid;
  for (const auto &f : plotdata_figures()) valid += " " + f;
  throw std::invalid_argument("unknown figure '" + figure + "'; valid:" + valid);
}

}  // namespace churn
