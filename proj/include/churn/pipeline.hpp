#pragma once

#include <map>
#include <string>
#include <vector>

#include "churn/as_map.hpp"
#include "churn/ingest.hpp"
#include "churn/intervals.hpp"
#include "churn/model.hpp"
#include "churn/period.hpp"
#include "churn/stats.hpp"

namespace churn {

struct WindowRecord {
  std::string agent_id;
  std::size_t window_index = 0;  // per agent, over surviving windows
  OnlineWindow window;
};

struct EstimateRecord {
  std::string agent_id;
  AsNumber as_number = kUnknownAs;
  std::size_t window_index = 0;
  PeriodEstimate estimate;
};

struct SkipRecord {
  std::string agent_id;
  std::size_t window_index = 0;
  SkipReason reason = SkipReason::none;
};

struct AsPeriodTable {
  double xi_threshold = 0.0;
  std::vector<AsPeriodSummary> summaries;
};

struct AnalysisResult {
  CleaningReport cleaning;
  std::vector<AgentStats> agents;            // sorted by agent_id
  std::vector<WindowRecord> windows;         // agent order, then time
  std::vector<OfflineWindow> offline_windows;
  std::vector<EstimateRecord> estimates;
  std::vector<SkipRecord> skipped;
  std::vector<AsStats> as_stats;
  ChangeProbabilityCurve change_curve;
  OccupancyHistograms occupancy;
  std::vector<AsPeriodTable> as_periods;     // one table per xi threshold
  std::size_t multi_as_windows_dropped = 0;
  std::size_t zero_intervals_removed = 0;
};

// Number of workers: CHURN_THREADS when set, else hardware concurrency.
unsigned worker_count();

// Full batch analysis over cleaned traces. Deterministic regardless of the
// worker count: per-agent work is independent and results are emitted in
// agent order.
AnalysisResult run_analysis(const std::vector<AgentTrace> &traces,
                            const CleaningReport &cleaning,
                            const IpAsMap &map, const AnalysisConfig &cfg);

}  // namespace churn
