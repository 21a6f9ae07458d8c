#include "doctest.h"

#include <sstream>

#include "churn/ingest.hpp"
#include "churn/pipeline.hpp"
#include "churn/report.hpp"
#include "churn/synth.hpp"
#include "churn/verify.hpp"
#include "json.hpp"

using namespace churn;

namespace {

struct RunOutput {
  AnalysisResult result;
  AnalysisConfig cfg;
  GroundTruth truth;
  std::string json;
};

RunOutput run_scenario(const std::string &spec_text) {
  auto spec = ScenarioSpec::from_json_text(spec_text);
  auto out = generate(spec);

  std::ostringstream log;
  write_log_csv(out, log);
  std::istringstream log_in(log.str());

  AnalysisConfig cfg;
  cfg.window_start = spec.window_start;
  cfg.window_end = spec.window_end();

  auto parsed = parse_log(log_in, LogFormat::csv, cfg);
  auto cleaned = remove_clones(std::move(parsed.traces));
  CleaningReport cleaning = parsed.report;
  cleaning.merge(cleaned.report);

  IpAsMap map;
  for (const auto &[prefix, as] : out.truth.as_map_rows) {
    auto cidr = parse_cidr(prefix);
    map.add_prefix(cidr->first, cidr->second, as);
  }

  RunOutput r;
  r.result = run_analysis(cleaned.traces, cleaning, map, cfg);
  r.cfg = cfg;
  r.truth = out.truth;
  r.json = report_to_json(r.result, cfg, {});
  return r;
}

const char *kSmallScenario = R"({
  "seed": 21, "window_start": 0, "window_days": 10,
  "blocks": [
    {"as_number": 100, "prefix": "10.0.0.0/16", "agent_count": 6,
     "fixed_fraction": 0.5, "lease_period_hours": 24,
     "cadence_min_minutes": 30, "cadence_max_minutes": 30},
    {"as_number": 200, "prefix": "20.0.0.0/16", "agent_count": 4,
     "fixed_fraction": 1.0,
     "cadence_min_minutes": 30, "cadence_max_minutes": 30}
  ]
})";

}  // namespace

TEST_CASE("report json parses and echoes the config") {
  auto r = run_scenario(kSmallScenario);
  auto j = nlohmann::json::parse(r.json);
  CHECK(j.at("schema_version") == kReportSchemaVersion);
  CHECK(j.at("config").at("gap_seconds") == 3 * kHour);
  CHECK(j.at("agents").size() == 10);
  CHECK(!j.at("windows").empty());
  CHECK(!j.at("as_periods").empty());
  // round trip: parse(emit(r)) reproduces the same document
  CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("analysis output is deterministic across runs and thread counts") {
  auto a = run_scenario(kSmallScenario);
  setenv("CHURN_THREADS", "3", 1);
  auto b = run_scenario(kSmallScenario);
  unsetenv("CHURN_THREADS");
  CHECK(a.json == b.json);
}

TEST_CASE("csv emitters produce headers and rows") {
  auto r = run_scenario(kSmallScenario);
  CHECK(agents_csv(r.result).rfind("agent_id,", 0) == 0);
  CHECK(as_stats_csv(r.result).find("\n100,") != std::string::npos);
  CHECK(estimates_csv(r.result).rfind("agent_id,", 0) == 0);
  CHECK(change_probability_csv(r.result).rfind("lower_hours,", 0) == 0);
  CHECK(as_periods_csv(r.result).rfind("xi_threshold,", 0) == 0);
}

TEST_CASE("plotdata emits every known figure and rejects unknown ones") {
  auto r = run_scenario(kSmallScenario);
  for (const auto &fig : plotdata_figures()) {
    auto csv = plotdata_csv(r.json, fig);
    CHECK(!csv.empty());
    CHECK(csv.find('\n') != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(plotdata_csv(r.json, "nope"),
                       doctest::Contains("valid:"), std::invalid_argument);
}

TEST_CASE("ips-per-agent cdf starts at the fixed fraction") {
  auto r = run_scenario(kSmallScenario);
  auto csv = plotdata_csv(r.json, "ips-per-agent-cdf");
  // 7 of 10 agents are fixed (3 fixed in AS100, 4 in AS200)
  CHECK(csv.find("1,0.7") != std::string::npos);
}

TEST_CASE("verify passes on a clean scenario") {
  auto r = run_scenario(kSmallScenario);
  auto report = verify(r.json, r.truth, VerifyTolerances{});
  INFO(report.to_text());
  CHECK(report.all_pass());
}

TEST_CASE("verify flags a corrupted classification") {
  auto r = run_scenario(kSmallScenario);
  auto j = nlohmann::json::parse(r.json);
  for (auto &a : j["agents"]) a["is_fixed"] = !a["is_fixed"].get<bool>();
  auto report = verify(j.dump(), r.truth, VerifyTolerances{});
  CHECK(!report.all_pass());
}

TEST_CASE("verify rejects mismatched windows") {
  auto r = run_scenario(kSmallScenario);
  auto truth = r.truth;
  truth.window_end += kHour;
  CHECK_THROWS(verify(r.json, truth, VerifyTolerances{}));
}
