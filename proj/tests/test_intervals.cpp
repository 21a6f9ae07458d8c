#include "doctest.h"

#include "churn/intervals.hpp"

using namespace churn;

namespace {

AnalysisConfig cfg_3h() {
  AnalysisConfig cfg;
  cfg.window_start = 0;
  cfg.window_end = 60L * 24 * kHour;
  return cfg;
}

AgentTrace make_trace(std::vector<std::pair<Timestamp, Ipv4>> points) {
  AgentTrace t;
  t.agent_id = "a";
  for (auto [ts, ip] : points) t.accesses.push_back({"a", ts, ip});
  return t;
}

}  // namespace

TEST_CASE("raw intervals: maximal equal-IP runs") {
  auto t0 = Timestamp{1000};
  auto trace = make_trace({{t0, 1}, {t0 + 30 * kMinute, 1}, {t0 + 60 * kMinute, 2}});
  auto iv = build_raw_intervals(trace, cfg_3h());
  REQUIRE(iv.size() == 2);
  CHECK(iv[0].ip == 1);
  CHECK(iv[0].start == t0);
  CHECK(iv[0].end == t0 + 30 * kMinute);
  CHECK(iv[1].ip == 2);
  CHECK(iv[1].length() == 0);
}

TEST_CASE("raw intervals: gap over G splits a same-IP run") {
  auto trace = make_trace({{0, 1}, {4 * kHour, 1}});
  auto iv = build_raw_intervals(trace, cfg_3h());
  REQUIRE(iv.size() == 2);
  CHECK(iv[0].ip == 1);
  CHECK(iv[1].ip == 1);
}

TEST_CASE("raw intervals: degenerate cases") {
  auto one = build_raw_intervals(make_trace({{5, 9}}), cfg_3h());
  REQUIRE(one.size() == 1);
  CHECK(one[0].length() == 0);
  CHECK(build_raw_intervals(make_trace({}), cfg_3h()).empty());
}

TEST_CASE("zero filter drops glitches and rejoins same-IP neighbors") {
  auto t0 = Timestamp{0};
  auto trace = make_trace({{t0, 1},
                           {t0 + 30 * kMinute, 1},
                           {t0 + 60 * kMinute, 2},
                           {t0 + 90 * kMinute, 1},
                           {t0 + 120 * kMinute, 1}});
  auto raw = build_raw_intervals(trace, cfg_3h());
  REQUIRE(raw.size() == 3);
  auto res = filter_zero_intervals(std::move(raw), cfg_3h());
  CHECK(res.removed == 1);
  REQUIRE(res.intervals.size() == 1);
  CHECK(res.intervals[0].ip == 1);
  CHECK(res.intervals[0].start == t0);
  CHECK(res.intervals[0].end == t0 + 120 * kMinute);
}

TEST_CASE("zero filter identity and degenerate") {
  std::vector<Interval> ivs = {{"a", 1, 0, 100, kUnknownAs},
                               {"a", 2, 200, 300, kUnknownAs}};
  auto res = filter_zero_intervals(ivs, cfg_3h());
  CHECK(res.removed == 0);
  CHECK(res.intervals == std::vector<Interval>{ivs});

  std::vector<Interval> zero = {{"a", 1, 50, 50, kUnknownAs}};
  auto res2 = filter_zero_intervals(zero, cfg_3h());
  CHECK(res2.removed == 1);
  CHECK(res2.intervals.empty());
}

TEST_CASE("window grouping at the gap threshold") {
  // interval gaps 1h, 5h, 1h
  std::vector<Interval> ivs = {
      {"a", 1, 0, 1 * kHour, kUnknownAs},
      {"a", 2, 2 * kHour, 3 * kHour, kUnknownAs},
      {"a", 3, 8 * kHour, 9 * kHour, kUnknownAs},
      {"a", 4, 10 * kHour, 11 * kHour, kUnknownAs},
  };
  auto part = group_windows(ivs, cfg_3h());
  REQUIRE(part.online.size() == 2);
  REQUIRE(part.offline.size() == 1);
  CHECK(part.offline[0].length() == 5 * kHour);
  CHECK(part.offline[0].ip_before == 2);
  CHECK(part.offline[0].ip_after == 3);
}

TEST_CASE("all gaps under G: one window, no offline") {
  std::vector<Interval> ivs = {{"a", 1, 0, kHour, kUnknownAs},
                               {"a", 2, 2 * kHour, 3 * kHour, kUnknownAs}};
  auto part = group_windows(ivs, cfg_3h());
  CHECK(part.online.size() == 1);
  CHECK(part.offline.empty());
}

TEST_CASE("same-IP reconnect records ip_before == ip_after") {
  std::vector<Interval> ivs = {{"a", 7, 0, kHour, kUnknownAs},
                               {"a", 7, 6 * kHour, 7 * kHour, kUnknownAs}};
  auto part = group_windows(ivs, cfg_3h());
  REQUIRE(part.offline.size() == 1);
  CHECK(part.offline[0].ip_before == 7);
  CHECK(part.offline[0].ip_after == 7);
  CHECK(!part.offline[0].ip_changed());
}

TEST_CASE("symmetric gap split") {
  OnlineWindow w;
  w.agent_id = "a";
  w.intervals = {{"a", 1, 0, 10 * kMinute, kUnknownAs},
                 {"a", 2, 20 * kMinute, 30 * kMinute, kUnknownAs}};
  auto out = split_gaps(w);
  CHECK(out.intervals[0].end == 15 * kMinute);
  CHECK(out.intervals[1].start == 15 * kMinute);
  CHECK(out.start == 0);
  CHECK(out.end == 30 * kMinute);
}

TEST_CASE("gap split: zero gap unchanged, odd gap favors the earlier side") {
  OnlineWindow w;
  w.intervals = {{"a", 1, 0, 100, kUnknownAs}, {"a", 2, 100, 200, kUnknownAs}};
  auto same = split_gaps(w);
  CHECK(same.intervals[0].end == 100);

  OnlineWindow odd;
  odd.intervals = {{"a", 1, 0, 100, kUnknownAs}, {"a", 2, 103, 200, kUnknownAs}};
  auto out = split_gaps(odd);
  CHECK(out.intervals[0].end == 102);  // earlier interval takes the odd second
  CHECK(out.intervals[1].start == 102);
}

TEST_CASE("gap split extension is bounded by G/2") {
  Duration gap = 3 * kHour - kMinute;  // just under G
  OnlineWindow w;
  w.intervals = {{"a", 1, 0, 10 * kMinute, kUnknownAs},
                 {"a", 2, 10 * kMinute + gap, 10 * kMinute + gap + kMinute,
                  kUnknownAs}};
  auto out = split_gaps(w);
  Duration extension = out.intervals[0].end - 10 * kMinute;
  CHECK(extension <= 3 * kHour / 2);
  CHECK(extension == (gap + 1) / 2);
}

TEST_CASE("after gap split interval lengths sum to the window span") {
  OnlineWindow w;
  w.intervals = {{"a", 1, 0, 55, kUnknownAs},
                 {"a", 2, 100, 223, kUnknownAs},
                 {"a", 3, 1000, 1001, kUnknownAs}};
  auto out = split_gaps(w);
  Duration sum = 0;
  for (std::size_t i = 0; i < out.intervals.size(); ++i) {
    sum += out.intervals[i].length();
    if (i > 0) CHECK(out.intervals[i].start == out.intervals[i - 1].end);
  }
  CHECK(sum == out.end - out.start);
}

TEST_CASE("multi-AS window filter") {
  IpAsMap map;
  map.add_prefix(*parse_ipv4("10.0.0.0"), 8, 100);
  map.add_prefix(*parse_ipv4("20.0.0.0"), 8, 200);

  auto window_with = [](std::vector<Ipv4> ips) {
    OnlineWindow w;
    Timestamp t = 0;
    for (Ipv4 ip : ips) {
      w.intervals.push_back({"a", ip, t, t + kHour, kUnknownAs});
      t += kHour;
    }
    w.start = 0;
    w.end = t;
    return w;
  };

  Ipv4 in10 = *parse_ipv4("10.1.1.1");
  Ipv4 in10b = *parse_ipv4("10.2.2.2");
  Ipv4 in20 = *parse_ipv4("20.1.1.1");
  Ipv4 nowhere = *parse_ipv4("30.1.1.1");

  auto kept = drop_multi_as_windows({window_with({in10, in10b})}, map);
  CHECK(kept.windows.size() == 1);
  CHECK(kept.windows[0].as_number == 100);

  auto dropped = drop_multi_as_windows({window_with({in10, in20})}, map);
  CHECK(dropped.windows.empty());
  CHECK(dropped.dropped == 1);

  auto with_unknown = drop_multi_as_windows({window_with({in10, nowhere})}, map);
  CHECK(with_unknown.windows.size() == 1);
  CHECK(with_unknown.windows[0].as_number == 100);

  auto all_unknown = drop_multi_as_windows({window_with({nowhere})}, map);
  CHECK(all_unknown.windows.size() == 1);
  CHECK(all_unknown.windows[0].as_number == kUnknownAs);
}

TEST_CASE("every access timestamp falls inside exactly one online window") {
  IpAsMap map;
  map.add_prefix(*parse_ipv4("10.0.0.0"), 8, 100);
  auto trace = make_trace({{0, *parse_ipv4("10.0.0.1")},
                           {kHour, *parse_ipv4("10.0.0.1")},
                           {2 * kHour, *parse_ipv4("10.0.0.2")},
                           {3 * kHour, *parse_ipv4("10.0.0.2")},
                           {10 * kHour, *parse_ipv4("10.0.0.3")},
                           {11 * kHour, *parse_ipv4("10.0.0.3")}});
  auto aw = build_agent_windows(trace, cfg_3h(), map);
  for (const auto &acc : trace.accesses) {
    int containing = 0;
    for (const auto &w : aw.online)
      if (acc.timestamp >= w.start && acc.timestamp <= w.end) ++containing;
    CHECK(containing == 1);
  }
}

TEST_CASE("grouping then splitting is idempotent") {
  auto cfg = cfg_3h();
  std::vector<Interval> ivs = {{"a", 1, 0, kHour, kUnknownAs},
                               {"a", 2, 2 * kHour, 3 * kHour, kUnknownAs},
                               {"a", 3, 9 * kHour, 10 * kHour, kUnknownAs}};
  auto part = group_windows(ivs, cfg);
  for (auto &w : part.online) w = split_gaps(std::move(w));

  // run the grouped, split intervals through the pipeline again
  for (const auto &w : part.online) {
    auto again = group_windows(w.intervals, cfg);
    REQUIRE(again.online.size() == 1);
    auto resplit = split_gaps(again.online[0]);
    CHECK(resplit.intervals == w.intervals);
  }
}
