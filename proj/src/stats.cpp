#include "churn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace churn {

AsNumber majority_as(const AgentWindows &agent) {
  std::map<AsNumber, Duration> time_per_as;
  for (const auto &w : agent.online) {
    if (w.as_number == kUnknownAs) continue;
    time_per_as[w.as_number] += w.length();
  }
  AsNumber best = kUnknownAs;
  Duration best_time = -1;
  for (const auto &[as, t] : time_per_as) {
    if (t > best_time) {  // map order makes the tie-break the lowest AS
      best_time = t;
      best = as;
    }
  }
  return best;
}

AgentStats agent_stats(const AgentWindows &agent, const AnalysisConfig &cfg) {
  AgentStats s;
  s.agent_id = agent.agent_id;
  if (agent.online.empty()) {
    s.empty = true;
    return s;
  }
  std::set<Ipv4> ips;
  Duration online_time = 0;
  for (const auto &w : agent.online) {
    online_time += w.length();
    for (const auto &iv : w.intervals) {
      ips.insert(iv.ip);
      s.max_interval = std::max(s.max_interval, iv.length());
    }
  }
  s.distinct_ip_count = ips.size();
  s.is_fixed = ips.size() == 1;
  s.percent_online = static_cast<double>(online_time) /
                     static_cast<double>(cfg.window_length());
  s.online_window_count = agent.online.size();
  s.offline_window_count = agent.offline.size();
  s.as_number = majority_as(agent);
  return s;
}

DistributionSummary summarize(std::vector<double> values) {
  DistributionSummary d;
  d.count = values.size();
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.min = values.front();
  d.max = values.back();
  double sum = 0.0;
  for (double v : values) sum += v;
  d.mean = sum / static_cast<double>(values.size());
  std::size_t n = values.size();
  d.median = (n % 2 == 1) ? values[n / 2]
                          : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return d;
}

std::vector<AsStats> as_aggregate(const std::vector<AgentStats> &agents,
                                  const IpAsMap &map) {
  std::map<AsNumber, std::vector<const AgentStats *>> by_as;
  for (const auto &a : agents) {
    if (a.empty || a.as_number == kUnknownAs) continue;
    by_as[a.as_number].push_back(&a);
  }
  std::vector<AsStats> out;
  for (const auto &[as, members] : by_as) {
    AsStats s;
    s.as_number = as;
    s.as_class = map.as_class(as);
    s.agent_count = members.size();
    std::vector<double> on_all, on_fixed, on_nonfixed;
    std::vector<double> mi_all, mi_fixed, mi_nonfixed;
    std::size_t fixed = 0;
    for (const auto *a : members) {
      double mi_hours = static_cast<double>(a->max_interval) / kHour;
      on_all.push_back(a->percent_online);
      mi_all.push_back(mi_hours);
      if (a->is_fixed) {
        ++fixed;
        on_fixed.push_back(a->percent_online);
        mi_fixed.push_back(mi_hours);
      } else {
        on_nonfixed.push_back(a->percent_online);
        mi_nonfixed.push_back(mi_hours);
      }
    }
    s.percent_fixed_agents =
        static_cast<double>(fixed) / static_cast<double>(members.size());
    s.percent_online_all = summarize(std::move(on_all));
    s.percent_online_fixed = summarize(std::move(on_fixed));
    s.percent_online_non_fixed = summarize(std::move(on_nonfixed));
    s.max_interval_hours_all = summarize(std::move(mi_all));
    s.max_interval_hours_fixed = summarize(std::move(mi_fixed));
    s.max_interval_hours_non_fixed = summarize(std::move(mi_nonfixed));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ChangeProbabilityBin> make_log_bins(Duration lower, Duration upper,
                                                std::size_t count) {
  std::vector<ChangeProbabilityBin> bins(count);
  const double lo = std::log(static_cast<double>(lower));
  const double hi = std::log(static_cast<double>(upper));
  for (std::size_t i = 0; i < count; ++i) {
    auto edge = [&](std::size_t j) {
      return static_cast<Duration>(std::llround(
          std::exp(lo + (hi - lo) * static_cast<double>(j) /
                            static_cast<double>(count))));
    };
    bins[i].lower = edge(i);
    bins[i].upper = edge(i + 1);
  }
  return bins;
}

ChangeProbabilityCurve change_probability(
    const std::vector<OfflineWindow> &offline_windows,
    std::vector<ChangeProbabilityBin> bins) {
  for (const auto &w : offline_windows) {
    const Duration len = w.length();
    for (auto &b : bins) {
      bool is_last = (&b == &bins.back());
      if (len >= b.lower && (len < b.upper || (is_last && len <= b.upper))) {
        ++b.sample_count;
        if (w.ip_changed()) ++b.changed_count;
        break;
      }
    }
  }
  for (auto &b : bins) {
    if (b.sample_count > 0)
      b.probability = static_cast<double>(b.changed_count) /
                      static_cast<double>(b.sample_count);
  }
  return ChangeProbabilityCurve{std::move(bins)};
}

OccupancyHistograms agents_per_ip_and_as(const std::vector<AgentTrace> &traces,
                                         const IpAsMap &map) {
  OccupancyHistograms h;
  for (const auto &t : traces) {
    std::set<Ipv4> ips;
    for (const auto &r : t.accesses) ips.insert(r.ip);
    std::set<AsNumber> ases;
    for (Ipv4 ip : ips) {
      ++h.agents_per_ip[ip];
      AsNumber as = map.resolve(ip);
      if (as != kUnknownAs) ases.insert(as);
    }
    for (AsNumber as : ases) ++h.agents_per_as[as];
  }
  return h;
}

}  // namespace churn
