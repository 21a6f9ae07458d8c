#include "churn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace churn {

using nlohmann::json;

bool VerifyReport::all_pass() const {
  for (const auto &m : metrics)
    if (m.applicable && !m.pass) return false;
  return true;
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  for (const auto &m : metrics) {
    if (!m.applicable)
      os << "SKIP " << m.name << " (no cohort)\n";
    else
      os << (m.pass ? "PASS " : "FAIL ") << m.name << " value=" << m.value
         << (m.detail.empty() ? "" : " " + m.detail) << '\n';
  }
  os << (all_pass() ? "VERIFY PASS\n" : "VERIFY FAIL\n");
  return os.str();
}

namespace {

std::vector<Timestamp> truth_change_instants(const AgentTruth &t) {
  std::vector<Timestamp> out;
  for (std::size_t i = 0; i + 1 < t.intervals.size(); ++i) {
    if (t.intervals[i].end == t.intervals[i + 1].start &&
        t.intervals[i].ip != t.intervals[i + 1].ip)
      out.push_back(t.intervals[i].end);
  }
  return out;
}

}  // namespace

VerifyReport verify(const std::string &report_json, const GroundTruth &truth,
                    const VerifyTolerances &tol) {
  json rep = json::parse(report_json);
  VerifyReport out;

  const Timestamp rep_ws = rep.at("config").at("window_start").get<Timestamp>();
  const Timestamp rep_we = rep.at("config").at("window_end").get<Timestamp>();
  if (rep_ws != truth.window_start || rep_we != truth.window_end)
    throw std::runtime_error("verify: report and truth cover different windows");
  const double gap_seconds = rep.at("config").at("gap_seconds").get<double>();

  std::map<std::string, const AgentTruth *> truth_by_id;
  for (const auto &a : truth.agents) truth_by_id[a.agent_id] = &a;

  struct RepAgent {
    bool is_fixed = false;
    bool empty = true;
    double percent_online = 0.0;
    double max_interval = 0.0;
  };
  std::map<std::string, RepAgent> rep_agents;
  for (const auto &a : rep.at("agents")) {
    RepAgent ra;
    ra.is_fixed = a.at("is_fixed").get<bool>();
    ra.empty = a.at("empty").get<bool>();
    ra.percent_online = a.at("percent_online").get<double>();
    ra.max_interval = a.at("max_interval_seconds").get<double>();
    rep_agents[a.at("agent_id").get<std::string>()] = ra;
  }

  // clone survivors: one representative per shared IP set
  {
    std::map<Ipv4, std::vector<const AgentTruth *>> clone_groups;
    for (const auto &a : truth.agents)
      if (a.clone && !a.intervals.empty())
        clone_groups[a.intervals.front().ip].push_back(&a);
    MetricResult m{"clone_survivors", !clone_groups.empty(), true, 0, ""};
    for (const auto &[ip, group] : clone_groups) {
      std::size_t survivors = 0;
      for (const auto *a : group)
        if (rep_agents.count(a->agent_id)) ++survivors;
      m.value = static_cast<double>(survivors);
      if (survivors != 1) {
        m.pass = false;
        m.detail = "group " + format_ipv4(ip) + " has " +
                   std::to_string(survivors) + " survivors";
      }
    }
    out.metrics.push_back(std::move(m));
  }

  // comparable cohort: surviving, non-roaming, non-empty
  std::vector<std::pair<const AgentTruth *, const RepAgent *>> cohort;
  for (const auto &[id, ra] : rep_agents) {
    auto it = truth_by_id.find(id);
    if (it == truth_by_id.end() || it->second->roaming || ra.empty) continue;
    cohort.emplace_back(it->second, &ra);
  }

  // classification
  {
    MetricResult m{"classification_accuracy", !cohort.empty(), true, 0, ""};
    std::size_t match = 0;
    for (const auto &[t, r] : cohort)
      if (t->fixed == r->is_fixed) ++match;
    if (!cohort.empty()) {
      m.value = static_cast<double>(match) / static_cast<double>(cohort.size());
      m.pass = m.value >= tol.classification_min_accuracy;
      m.detail = std::to_string(match) + "/" + std::to_string(cohort.size());
    }
    out.metrics.push_back(std::move(m));
  }

  {
    // measured online time can only exceed truth through gap-splitting slack
    double worst = 0.0;
    for (const auto &[t, r] : cohort)
      worst = std::max(worst, r->percent_online - t->percent_online);
    MetricResult m{"percent_online_not_overestimated", !cohort.empty(),
                   worst <= tol.percent_online_max_error, worst, ""};
    out.metrics.push_back(std::move(m));
  }
  {
    // symmetric error bound; a server downtime > G makes every agent lose
    // online time the truth does not know about, so the strict form is
    // skipped when the whole cohort lost more than the tolerance
    double worst = 0.0;
    for (const auto &[t, r] : cohort)
      worst = std::max(worst, std::abs(r->percent_online - t->percent_online));
    // heuristic: if every agent lost more than the tolerance in the same
    // direction, a downtime window is the likely cause and the strict check
    // does not apply
    std::size_t lost = 0;
    for (const auto &[t, r] : cohort)
      if (t->percent_online - r->percent_online > tol.percent_online_max_error)
        ++lost;
    bool has_long_downtime = !cohort.empty() && lost == cohort.size();
    MetricResult m{"percent_online_error",
                   !cohort.empty() && !has_long_downtime,
                   worst <= tol.percent_online_max_error, worst, ""};
    out.metrics.push_back(std::move(m));
  }

  // boundary error: reconstructed IP-change boundaries vs truth instants
  {
    double worst = 0.0;
    std::size_t boundaries = 0;
    for (const auto &w : rep.at("windows")) {
      const std::string id = w.at("agent_id").get<std::string>();
      auto it = truth_by_id.find(id);
      if (it == truth_by_id.end() || it->second->roaming) continue;
      auto instants = truth_change_instants(*it->second);
      const auto &ivs = w.at("intervals");
      for (std::size_t i = 0; i + 1 < ivs.size(); ++i) {
        if (ivs[i].at("ip") == ivs[i + 1].at("ip")) continue;
        Timestamp b = ivs[i].at("end").get<Timestamp>();
        ++boundaries;
        double best = gap_seconds;  // no truth instant nearby counts as G off
        for (Timestamp c : instants)
          best = std::min(best, std::abs(static_cast<double>(c - b)));
        worst = std::max(worst, best);
      }
    }
    MetricResult m{"boundary_error_seconds", boundaries > 0,
                   worst <= tol.boundary_max_error_seconds, worst,
                   std::to_string(boundaries) + " boundaries"};
    out.metrics.push_back(std::move(m));
  }

  // period recovery: per-agent xi-weighted period from the raw estimates
  {
    std::map<std::string, std::pair<double, double>> acc;  // xi_sum, xi*P
    std::map<std::string, std::size_t> window_counts;
    for (const auto &e : rep.at("estimates")) {
      const std::string id = e.at("agent_id").get<std::string>();
      double xi = e.at("xi").get<double>();
      double p = e.at("period_minutes").get<double>();
      acc[id].first += xi;
      acc[id].second += xi * p;
      ++window_counts[id];
    }
    std::size_t periodic = 0, recovered = 0;
    for (const auto &t : truth.agents) {
      if (!t.periodic || t.clone || !rep_agents.count(t.agent_id)) continue;
      ++periodic;
      auto it = acc.find(t.agent_id);
      if (it == acc.end() || it->second.first <= 0.0) continue;
      double p_hours = it->second.second / it->second.first / 60.0;
      if (std::abs(p_hours - *t.period_hours) / *t.period_hours <=
          tol.period_max_rel_error)
        ++recovered;
    }
    MetricResult m{"period_recovery", periodic > 0, true, 0, ""};
    if (periodic > 0) {
      m.value =
          static_cast<double>(recovered) / static_cast<double>(periodic);
      m.pass = m.value >= tol.period_min_pass_fraction;
      m.detail = std::to_string(recovered) + "/" + std::to_string(periodic);
    }
    out.metrics.push_back(std::move(m));
  }

  // xi separation for the sporadic cohort
  {
    std::vector<double> xis;
    for (const auto &e : rep.at("estimates")) {
      auto it = truth_by_id.find(e.at("agent_id").get<std::string>());
      if (it == truth_by_id.end()) continue;
      const auto &t = *it->second;
      if (t.periodic || t.fixed || t.roaming || t.clone) continue;
      xis.push_back(e.at("xi").get<double>());
    }
    MetricResult m{"xi_nonperiodic_below_threshold", !xis.empty(), true, 0, ""};
    if (!xis.empty()) {
      std::size_t below = 0;
      for (double x : xis)
        if (x < tol.xi_nonperiodic_ceiling) ++below;
      m.value = static_cast<double>(below) / static_cast<double>(xis.size());
      m.pass = m.value >= tol.xi_nonperiodic_min_fraction;
      m.detail = std::to_string(below) + "/" + std::to_string(xis.size());
    }
    out.metrics.push_back(std::move(m));
  }

  // roaming agents must contribute no windows and no estimates
  {
    std::set<std::string> roaming_ids;
    for (const auto &t : truth.agents)
      if (t.roaming) roaming_ids.insert(t.agent_id);
    MetricResult m{"roaming_excluded", !roaming_ids.empty(), true, 0, ""};
    std::size_t leaks = 0;
    for (const auto &w : rep.at("windows"))
      if (roaming_ids.count(w.at("agent_id").get<std::string>())) ++leaks;
    for (const auto &e : rep.at("estimates"))
      if (roaming_ids.count(e.at("agent_id").get<std::string>())) ++leaks;
    m.value = static_cast<double>(leaks);
    m.pass = leaks == 0;
    out.metrics.push_back(std::move(m));
  }

  return out;
}

}  // namespace churn
