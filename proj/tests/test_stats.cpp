#include "doctest.h"

#include "churn/stats.hpp"

using namespace churn;

namespace {

AnalysisConfig cfg_10d() {
  AnalysisConfig cfg;
  cfg.window_start = 0;
  cfg.window_end = 10L * 24 * kHour;
  return cfg;
}

OnlineWindow window_of(std::vector<Interval> ivs, AsNumber as = 100) {
  OnlineWindow w;
  w.agent_id = ivs.front().agent_id;
  w.start = ivs.front().start;
  w.end = ivs.back().end;
  w.intervals = std::move(ivs);
  w.as_number = as;
  return w;
}

}  // namespace

TEST_CASE("agent stats: fixed agent covering most of the window") {
  auto cfg = cfg_10d();
  Duration nine_days = 9L * 24 * kHour;
  AgentWindows aw;
  aw.agent_id = "a1";
  aw.online.push_back(window_of({{"a1", 1, 0, nine_days, 100}}));
  auto s = agent_stats(aw, cfg);
  CHECK(s.is_fixed);
  CHECK(s.distinct_ip_count == 1);
  CHECK(s.percent_online == doctest::Approx(0.9));
  CHECK(s.max_interval == nine_days);
  CHECK(s.as_number == 100);
}

TEST_CASE("agent stats: alternating IPs are non-fixed") {
  AgentWindows aw;
  aw.agent_id = "a1";
  aw.online.push_back(window_of(
      {{"a1", 1, 0, kHour, 100}, {"a1", 2, kHour, 2 * kHour, 100}}));
  auto s = agent_stats(aw, cfg_10d());
  CHECK(!s.is_fixed);
  CHECK(s.distinct_ip_count == 2);
}

TEST_CASE("agent stats: always-on single IP, and the empty agent") {
  auto cfg = cfg_10d();
  AgentWindows full;
  full.agent_id = "a1";
  full.online.push_back(
      window_of({{"a1", 1, 0, cfg.window_end, 100}}));
  auto s = agent_stats(full, cfg);
  CHECK(s.percent_online == doctest::Approx(1.0));
  CHECK(s.max_interval == cfg.window_length());

  AgentWindows none;
  none.agent_id = "a2";
  auto e = agent_stats(none, cfg);
  CHECK(e.empty);
}

TEST_CASE("as aggregate: fixed fraction and single-agent median") {
  IpAsMap map;
  std::vector<AgentStats> agents;
  auto add = [&](std::string id, AsNumber as, bool fixed, double online) {
    AgentStats s;
    s.agent_id = id;
    s.as_number = as;
    s.is_fixed = fixed;
    s.distinct_ip_count = fixed ? 1 : 2;
    s.percent_online = online;
    agents.push_back(s);
  };
  add("a1", 100, true, 0.9);
  add("a2", 100, true, 0.8);
  add("a3", 100, false, 0.3);
  add("b1", 200, true, 0.7);

  auto stats = as_aggregate(agents, map);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].as_number == 100);
  CHECK(stats[0].percent_fixed_agents == doctest::Approx(2.0 / 3.0));
  CHECK(stats[0].percent_online_all.median == doctest::Approx(0.8));
  CHECK(stats[1].agent_count == 1);
  CHECK(stats[1].percent_online_all.median == doctest::Approx(0.7));
}

TEST_CASE("as aggregate is consistent under agent-set union") {
  IpAsMap map;
  std::vector<AgentStats> part1, part2, all;
  for (int i = 0; i < 9; ++i) {
    AgentStats s;
    s.agent_id = "a" + std::to_string(i);
    s.as_number = 100 + (i % 2) * 100;
    s.is_fixed = i % 3 == 0;
    s.percent_online = 0.1 * static_cast<double>(i + 1);
    (i < 5 ? part1 : part2).push_back(s);
    all.push_back(s);
  }
  std::vector<AgentStats> merged = part1;
  merged.insert(merged.end(), part2.begin(), part2.end());
  auto a = as_aggregate(all, map);
  auto b = as_aggregate(merged, map);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].as_number == b[i].as_number);
    CHECK(a[i].agent_count == b[i].agent_count);
    CHECK(a[i].percent_fixed_agents == doctest::Approx(b[i].percent_fixed_agents));
    CHECK(a[i].percent_online_all.mean ==
          doctest::Approx(b[i].percent_online_all.mean));
  }
}

TEST_CASE("change probability: constant outcomes") {
  auto bins = make_log_bins(3 * kHour, 1024 * kHour, 12);
  REQUIRE(bins.size() == 12);
  CHECK(bins.front().lower == 3 * kHour);
  CHECK(bins.back().upper == 1024 * kHour);

  std::vector<OfflineWindow> keep, change;
  for (int i = 0; i < 50; ++i) {
    Duration len = (3 + i) * kHour;
    keep.push_back({"a", 0, len, 1, 1});
    change.push_back({"a", 0, len, 1, 2});
  }
  auto zero = change_probability(keep, bins);
  for (const auto &b : zero.bins)
    if (b.probability) CHECK(*b.probability == 0.0);
  auto one = change_probability(change, bins);
  for (const auto &b : one.bins)
    if (b.probability) CHECK(*b.probability == 1.0);
}

TEST_CASE("change probability: empty bins are absent, not zero") {
  auto curve = change_probability({}, make_log_bins(3 * kHour, 1024 * kHour, 12));
  for (const auto &b : curve.bins) {
    CHECK(!b.probability.has_value());
    CHECK(b.sample_count == 0);
  }
}

TEST_CASE("agents per IP and AS histograms") {
  IpAsMap map;
  map.add_prefix(*parse_ipv4("10.0.0.0"), 8, 100);
  Ipv4 nat = *parse_ipv4("10.0.0.7");
  std::vector<AgentTrace> traces;
  for (int i = 0; i < 3; ++i) {
    AgentTrace t;
    t.agent_id = "n" + std::to_string(i);
    t.accesses.push_back({t.agent_id, 100, nat});
    traces.push_back(t);
  }
  AgentTrace solo;
  solo.agent_id = "s";
  solo.accesses.push_back({"s", 100, *parse_ipv4("10.0.0.9")});
  traces.push_back(solo);

  auto h = agents_per_ip_and_as(traces, map);
  CHECK(h.agents_per_ip.at(nat) == 3);
  CHECK(h.agents_per_ip.at(*parse_ipv4("10.0.0.9")) == 1);
  CHECK(h.agents_per_as.at(100) == 4);
}

TEST_CASE("majority-AS assignment uses online time") {
  AgentWindows aw;
  aw.agent_id = "a";
  aw.online.push_back(window_of({{"a", 1, 0, 10 * kHour, 100}}, 100));
  aw.online.push_back(
      window_of({{"a", 2, 20 * kHour, 22 * kHour, 200}}, 200));
  CHECK(majority_as(aw) == 100);
}
