#include "churn/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace churn {

unsigned worker_count() {
  if (const char *env = std::getenv("CHURN_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

struct PerAgentOutput {
  AgentWindows windows;
  AgentStats stats;
  std::vector<EstimateRecord> estimates;
  std::vector<SkipRecord> skipped;
};

PerAgentOutput process_agent(const AgentTrace &trace, const IpAsMap &map,
                             const AnalysisConfig &cfg) {
  PerAgentOutput out;
  out.windows = build_agent_windows(trace, cfg, map);
  out.stats = agent_stats(out.windows, cfg);
  for (std::size_t wi = 0; wi < out.windows.online.size(); ++wi) {
    auto res = estimate_window(out.windows.online[wi], cfg);
    if (res.estimate) {
      out.estimates.push_back(EstimateRecord{
          trace.agent_id, out.windows.online[wi].as_number, wi, *res.estimate});
    } else {
      out.skipped.push_back(SkipRecord{trace.agent_id, wi, res.skip});
    }
  }
  return out;
}

}  // namespace

AnalysisResult run_analysis(const std::vector<AgentTrace> &traces,
                            const CleaningReport &cleaning,
                            const IpAsMap &map, const AnalysisConfig &cfg) {
  AnalysisResult result;
  result.cleaning = cleaning;

  std::vector<PerAgentOutput> per_agent(traces.size());
  const unsigned workers =
      std::min<unsigned>(worker_count(),
                         std::max<std::size_t>(traces.size(), 1));
  if (workers <= 1 || traces.size() < 2) {
    for (std::size_t i = 0; i < traces.size(); ++i)
      per_agent[i] = process_agent(traces[i], map, cfg);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < traces.size(); i += workers)
          per_agent[i] = process_agent(traces[i], map, cfg);
      });
    }
    for (auto &t : pool) t.join();
  }

  // deterministic emission in agent order
  std::map<std::string, AsNumber> membership;
  std::vector<TaggedEstimate> tagged;
  for (auto &pa : per_agent) {
    result.zero_intervals_removed += pa.windows.zero_intervals_removed;
    result.multi_as_windows_dropped += pa.windows.multi_as_windows_dropped;
    for (std::size_t wi = 0; wi < pa.windows.online.size(); ++wi)
      result.windows.push_back(
          WindowRecord{pa.windows.agent_id, wi, pa.windows.online[wi]});
    result.offline_windows.insert(result.offline_windows.end(),
                                  pa.windows.offline.begin(),
                                  pa.windows.offline.end());
    result.agents.push_back(pa.stats);
    membership[pa.stats.agent_id] = pa.stats.as_number;
    for (auto &e : pa.estimates) {
      tagged.push_back(TaggedEstimate{e.agent_id, e.estimate});
      result.estimates.push_back(std::move(e));
    }
    for (auto &s : pa.skipped) result.skipped.push_back(std::move(s));
  }

  result.as_stats = as_aggregate(result.agents, map);

  // change probability over offline windows of non-fixed agents only
  std::map<std::string, bool> fixed;
  for (const auto &a : result.agents) fixed[a.agent_id] = a.is_fixed;
  std::vector<OfflineWindow> non_fixed_offline;
  for (const auto &w : result.offline_windows)
    if (!fixed[w.agent_id]) non_fixed_offline.push_back(w);
  result.change_curve = change_probability(
      non_fixed_offline, make_log_bins(cfg.gap_threshold, 1024 * kHour, 12));

  result.occupancy = agents_per_ip_and_as(traces, map);

  auto per_agent_periods = agent_periods(tagged, membership);
  for (double thr : cfg.xi_thresholds)
    result.as_periods.push_back(
        AsPeriodTable{thr, as_period_summary(per_agent_periods, thr)});

  return result;
}

}  // namespace churn
