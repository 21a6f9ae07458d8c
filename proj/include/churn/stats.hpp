#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "churn/intervals.hpp"
#include "churn/model.hpp"

namespace churn {

struct AgentStats {
  std::string agent_id;
  AsNumber as_number = kUnknownAs;  // AS holding the majority of online time
  std::size_t distinct_ip_count = 0;
  bool is_fixed = false;
  double percent_online = 0.0;  // fraction of the analysis window
  Duration max_interval = 0;
  std::size_t online_window_count = 0;
  std::size_t offline_window_count = 0;
  bool empty = false;  // no intervals survived; excluded from aggregates
};

AgentStats agent_stats(const AgentWindows &agent, const AnalysisConfig &cfg);

struct DistributionSummary {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

DistributionSummary summarize(std::vector<double> values);

struct AsStats {
  AsNumber as_number = kUnknownAs;
  std::string as_class;
  std::size_t agent_count = 0;
  double percent_fixed_agents = 0.0;
  DistributionSummary percent_online_all;
  DistributionSummary percent_online_fixed;
  DistributionSummary percent_online_non_fixed;
  DistributionSummary max_interval_hours_all;
  DistributionSummary max_interval_hours_fixed;
  DistributionSummary max_interval_hours_non_fixed;
};

// Groups agents by their assigned AS (majority online time); unknown-AS
// agents are skipped. Output sorted by as_number.
std::vector<AsStats> as_aggregate(const std::vector<AgentStats> &agents,
                                  const IpAsMap &map);

struct ChangeProbabilityBin {
  Duration lower = 0;  // [lower, upper)
  Duration upper = 0;
  std::size_t sample_count = 0;
  std::size_t changed_count = 0;
  std::optional<double> probability;  // absent when the bin is empty
};

struct ChangeProbabilityCurve {
  std::vector<ChangeProbabilityBin> bins;
};

// Log-spaced offline-duration bins from G upward. count defaults to 12 bins
// reaching 1024 h. Only offline windows of non-fixed agents belong here.
std::vector<ChangeProbabilityBin> make_log_bins(Duration lower, Duration upper,
                                                std::size_t count);

ChangeProbabilityCurve change_probability(
    const std::vector<OfflineWindow> &offline_windows,
    std::vector<ChangeProbabilityBin> bins);

struct OccupancyHistograms {
  std::map<Ipv4, std::size_t> agents_per_ip;
  std::map<AsNumber, std::size_t> agents_per_as;
};

OccupancyHistograms agents_per_ip_and_as(const std::vector<AgentTrace> &traces,
                                         const IpAsMap &map);

// Majority-online-time AS over the agent's windows; kUnknownAs when nothing
// resolves.
AsNumber majority_as(const AgentWindows &agent);

}  // namespace churn
