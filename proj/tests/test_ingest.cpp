#include "doctest.h"

#include <sstream>

#include "churn/as_map.hpp"
#include "churn/ingest.hpp"

using namespace churn;

static AnalysisConfig wide_cfg() {
  AnalysisConfig cfg;
  cfg.window_start = 0;
  cfg.window_end = 1'000'000'000;
  return cfg;
}

TEST_CASE("csv parse groups, sorts, dedups") {
  std::istringstream in(
      "agent_id,timestamp,ip\n"
      "a1,1000,1.2.3.4\n"
      "a2,500,5.6.7.8\n"
      "a1,2000,1.2.3.4\n"
      "a1,1000,1.2.3.4\n"
      "a2,100,5.6.7.8\n");
  auto res = parse_log(in, LogFormat::csv, wide_cfg());
  REQUIRE(res.traces.size() == 2);
  CHECK(res.traces[0].agent_id == "a1");
  CHECK(res.traces[0].accesses.size() == 2);
  CHECK(res.traces[1].accesses.size() == 2);
  CHECK(res.traces[1].accesses[0].timestamp == 100);
  CHECK(res.report.duplicates_collapsed == 1);
  CHECK(res.report.rows_read == 5);
}

TEST_CASE("partial failure: one bad row among good ones") {
  std::ostringstream src;
  src << "agent_id,timestamp,ip\n";
  for (int i = 0; i < 100; ++i)
    src << "a1," << 1000 + i * 60 << ",1.2.3.4\n";
  src << "a1,9999,1.2.3.999\n";
  std::istringstream in(src.str());
  auto res = parse_log(in, LogFormat::csv, wide_cfg());
  CHECK(res.report.rows_accepted == 100);
  CHECK(res.report.rejections.at("malformed_ip") == 1);
  CHECK(res.traces.size() == 1);
}

TEST_CASE("ndjson rows") {
  std::istringstream in(
      "{\"agent_id\":\"a1\",\"timestamp\":1000,\"ip\":\"1.2.3.4\"}\n"
      "{\"agent_id\":\"a1\",\"timestamp\":\"1970-01-01T00:20:00Z\",\"ip\":\"1.2.3.5\"}\n"
      "not json\n");
  auto res = parse_log(in, LogFormat::ndjson, wide_cfg());
  REQUIRE(res.traces.size() == 1);
  CHECK(res.traces[0].accesses.size() == 2);
  CHECK(res.traces[0].accesses[1].timestamp == 1200);
  CHECK(res.report.rejections.at("bad_row") == 1);
}

TEST_CASE("parse is deterministic") {
  std::string src =
      "a2,500,5.6.7.8\na1,1000,1.2.3.4\na1,900,4.3.2.1\na3,1,9.9.9.9\n";
  std::istringstream in1(src), in2(src);
  auto r1 = parse_log(in1, LogFormat::csv, wide_cfg());
  auto r2 = parse_log(in2, LogFormat::csv, wide_cfg());
  REQUIRE(r1.traces.size() == r2.traces.size());
  for (std::size_t i = 0; i < r1.traces.size(); ++i) {
    CHECK(r1.traces[i].agent_id == r2.traces[i].agent_id);
    CHECK(r1.traces[i].accesses == r2.traces[i].accesses);
  }
}

static AgentTrace trace_with_ips(std::string id, std::vector<Ipv4> ips) {
  AgentTrace t;
  t.agent_id = id;
  Timestamp ts = 0;
  for (Ipv4 ip : ips) t.accesses.push_back({id, ts += 60, ip});
  return t;
}

TEST_CASE("clone removal by identical IP sets") {
  std::vector<AgentTrace> traces;
  traces.push_back(trace_with_ips("a2", {1, 2}));
  traces.push_back(trace_with_ips("a1", {2, 1, 2}));
  traces.push_back(trace_with_ips("a3", {1, 3}));
  auto res = remove_clones(traces);
  REQUIRE(res.traces.size() == 2);
  CHECK(res.traces[0].agent_id == "a1");  // lexicographically smallest survives
  CHECK(res.traces[1].agent_id == "a3");
  CHECK(res.report.clone_agents_removed == 1);
  CHECK(res.report.clone_sets.at("a1") == std::vector<std::string>{"a2"});
}

TEST_CASE("single-IP NAT agents are clones; distinct singletons are not") {
  std::vector<AgentTrace> traces;
  traces.push_back(trace_with_ips("a1", {7}));
  traces.push_back(trace_with_ips("a2", {7}));
  traces.push_back(trace_with_ips("b1", {8}));
  auto res = remove_clones(traces);
  REQUIRE(res.traces.size() == 2);
  CHECK(res.traces[0].agent_id == "a1");
  CHECK(res.traces[1].agent_id == "b1");
}

TEST_CASE("clone removal is idempotent and preserves survivors") {
  std::vector<AgentTrace> traces;
  traces.push_back(trace_with_ips("a1", {1, 2}));
  traces.push_back(trace_with_ips("a2", {1, 2}));
  traces.push_back(trace_with_ips("a3", {3}));
  auto once = remove_clones(traces);
  auto orig_a1 = trace_with_ips("a1", {1, 2});
  CHECK(once.traces[0].accesses == orig_a1.accesses);
  auto twice = remove_clones(once.traces);
  CHECK(twice.report.clone_agents_removed == 0);
  REQUIRE(twice.traces.size() == once.traces.size());
  for (std::size_t i = 0; i < once.traces.size(); ++i)
    CHECK(twice.traces[i].accesses == once.traces[i].accesses);
}

TEST_CASE("no clones: identity") {
  std::vector<AgentTrace> traces;
  traces.push_back(trace_with_ips("a1", {1}));
  traces.push_back(trace_with_ips("a2", {1, 2}));
  auto res = remove_clones(traces);
  CHECK(res.traces.size() == 2);
  CHECK(res.report.clone_agents_removed == 0);
}

TEST_CASE("as map longest prefix match") {
  IpAsMap map;
  map.add_prefix(*parse_ipv4("10.0.0.0"), 8, 100, "tier-2");
  CHECK(map.resolve(*parse_ipv4("10.1.2.3")) == 100);
  map.add_prefix(*parse_ipv4("10.1.0.0"), 16, 200);
  CHECK(map.resolve(*parse_ipv4("10.1.2.3")) == 200);
  CHECK(map.resolve(*parse_ipv4("192.0.2.1")) == kUnknownAs);
  CHECK(map.as_class(100) == "tier-2");

  IpAsMap empty;
  CHECK(empty.resolve(*parse_ipv4("192.0.2.1")) == kUnknownAs);
}

TEST_CASE("as map csv loading") {
  std::istringstream in(
      "prefix,asn,class\n10.0.0.0/8,100,tier-2\n10.1.0.0/16,200\n");
  auto map = IpAsMap::load_csv(in);
  CHECK(map.prefix_count() == 2);
  CHECK(map.resolve(*parse_ipv4("10.1.0.1")) == 200);
  CHECK(map.resolve(*parse_ipv4("10.2.0.1")) == 100);

  std::istringstream bad("foo,bar\n");
  CHECK_THROWS(IpAsMap::load_csv(bad));
}
