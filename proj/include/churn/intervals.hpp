#pragma once

#include <vector>

#include "churn/as_map.hpp"
#include "churn/model.hpp"

namespace churn {

// Maximal runs of one IP. A run also ends when the inter-access gap exceeds
// the threshold G. Raw intervals span first..last access of the run, so a
// single-access run yields a zero-length interval.
std::vector<Interval> build_raw_intervals(const AgentTrace &trace,
                                          const AnalysisConfig &cfg);

struct ZeroFilterResult {
  std::vector<Interval> intervals;
  std::size_t removed = 0;
};

// Drops zero-length intervals (an IP seen only once). Neighboring runs of the
// same IP whose gap stays below G merge afterwards, which makes the merged
// interval appear longer than reality; the vacated time is absorbed later by
// gap splitting.
ZeroFilterResult filter_zero_intervals(std::vector<Interval> intervals,
                                       const AnalysisConfig &cfg);

struct WindowPartition {
  std::vector<OnlineWindow> online;
  std::vector<OfflineWindow> offline;
};

// Partitions intervals into online windows at every gap >= G; offline windows
// fill the spaces between and record the IP on each side.
WindowPartition group_windows(std::vector<Interval> intervals,
                              const AnalysisConfig &cfg);

// Symmetric gap split: each in-window gap extends the preceding interval and
// advances the following one by half the gap. Odd gaps give the extra second
// to the preceding interval. Afterwards adjacent intervals abut exactly.
OnlineWindow split_gaps(OnlineWindow window);

struct MultiAsFilterResult {
  std::vector<OnlineWindow> windows;
  std::size_t dropped = 0;
};

// Resolves every interval IP and removes windows spanning two or more known
// ASes. Windows whose known resolutions agree keep that AS; windows with only
// unknown IPs are kept and tagged unknown-AS.
MultiAsFilterResult drop_multi_as_windows(std::vector<OnlineWindow> windows,
                                          const IpAsMap &map);

// Full per-agent pipeline: raw intervals, zero filter, grouping, gap split,
// multi-AS filter.
struct AgentWindows {
  std::string agent_id;
  std::vector<OnlineWindow> online;
  std::vector<OfflineWindow> offline;
  std::size_t zero_intervals_removed = 0;
  std::size_t multi_as_windows_dropped = 0;
};

AgentWindows build_agent_windows(const AgentTrace &trace,
                                 const AnalysisConfig &cfg, const IpAsMap &map);

}  // namespace churn
