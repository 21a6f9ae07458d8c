#include "churn/intervals.hpp"

#include <algorithm>
#include <set>

namespace churn {

std::vector<Interval> build_raw_intervals(const AgentTrace &trace,
                                          const AnalysisConfig &cfg) {
  std::vector<Interval> out;
  const auto &acc = trace.accesses;
  std::size_t run_start = 0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    bool last = (i + 1 == acc.size());
    bool breaks = last || acc[i + 1].ip != acc[i].ip ||
                  acc[i + 1].timestamp - acc[i].timestamp > cfg.gap_threshold;
    if (breaks) {
      out.push_back(Interval{trace.agent_id, acc[run_start].ip,
                             acc[run_start].timestamp, acc[i].timestamp,
                             kUnknownAs});
      run_start = i + 1;
    }
  }
  return out;
}

ZeroFilterResult filter_zero_intervals(std::vector<Interval> intervals,
                                       const AnalysisConfig &cfg) {
  ZeroFilterResult res;
  for (auto &iv : intervals) {
    if (iv.length() == 0) {
      ++res.removed;
      continue;
    }
    if (!res.intervals.empty()) {
      auto &prev = res.intervals.back();
      if (prev.ip == iv.ip && iv.start - prev.end <= cfg.gap_threshold) {
        prev.end = iv.end;  // same-IP runs rejoin once the glitch is gone
        continue;
      }
    }
    res.intervals.push_back(iv);
  }
  return res;
}

WindowPartition group_windows(std::vector<Interval> intervals,
                              const AnalysisConfig &cfg) {
  WindowPartition part;
  if (intervals.empty()) return part;
  const std::string agent = intervals.front().agent_id;

  OnlineWindow cur;
  cur.agent_id = agent;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (!cur.intervals.empty() &&
        intervals[i].start - cur.intervals.back().end >= cfg.gap_threshold) {
      part.offline.push_back(OfflineWindow{agent, cur.intervals.back().end,
                                           intervals[i].start,
                                           cur.intervals.back().ip,
                                           intervals[i].ip});
      cur.start = cur.intervals.front().start;
      cur.end = cur.intervals.back().end;
      part.online.push_back(std::move(cur));
      cur = OnlineWindow{};
      cur.agent_id = agent;
    }
    cur.intervals.push_back(std::move(intervals[i]));
  }
  cur.start = cur.intervals.front().start;
  cur.end = cur.intervals.back().end;
  part.online.push_back(std::move(cur));
  return part;
}

OnlineWindow split_gaps(OnlineWindow window) {
  auto &iv = window.intervals;
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
    Duration gap = iv[i + 1].start - iv[i].end;
    if (gap <= 0) continue;
    // odd gap: the extra second goes to the preceding interval
    Timestamp boundary = iv[i].end + (gap + 1) / 2;
    iv[i].end = boundary;
    iv[i + 1].start = boundary;
  }
  window.start = iv.front().start;
  window.end = iv.back().end;
  return window;
}

MultiAsFilterResult drop_multi_as_windows(std::vector<OnlineWindow> windows,
                                          const IpAsMap &map) {
  MultiAsFilterResult res;
  for (auto &w : windows) {
    std::set<AsNumber> known;
    for (auto &iv : w.intervals) {
      iv.as_number = map.resolve(iv.ip);
      if (iv.as_number != kUnknownAs) known.insert(iv.as_number);
    }
    if (known.size() >= 2) {
      ++res.dropped;
      continue;
    }
    w.as_number = known.empty() ? kUnknownAs : *known.begin();
    res.windows.push_back(std::move(w));
  }
  return res;
}

AgentWindows build_agent_windows(const AgentTrace &trace,
                                 const AnalysisConfig &cfg, const IpAsMap &map) {
  AgentWindows out;
  out.agent_id = trace.agent_id;

  auto raw = build_raw_intervals(trace, cfg);
  auto filtered = filter_zero_intervals(std::move(raw), cfg);
  out.zero_intervals_removed = filtered.removed;

  auto part = group_windows(std::move(filtered.intervals), cfg);
  for (auto &w : part.online) w = split_gaps(std::move(w));

  // Track which online windows survive so offline windows bordering a
  // removed multi-AS window drop out of the statistics with it.
  std::vector<bool> survived(part.online.size(), false);
  std::vector<OnlineWindow> kept;
  for (std::size_t i = 0; i < part.online.size(); ++i) {
    auto one = drop_multi_as_windows({part.online[i]}, map);
    if (!one.windows.empty()) {
      survived[i] = true;
      kept.push_back(std::move(one.windows.front()));
    } else {
      ++out.multi_as_windows_dropped;
    }
  }
  out.online = std::move(kept);
  for (std::size_t i = 0; i < part.offline.size(); ++i) {
    // offline window i sits between online windows i and i+1
    if (survived[i] && i + 1 < survived.size() && survived[i + 1])
      out.offline.push_back(part.offline[i]);
  }
  return out;
}

}  // namespace churn
