#include "doctest.h"

#include "churn/model.hpp"

using namespace churn;

static AnalysisConfig window_2010() {
  AnalysisConfig cfg;
  cfg.window_start = *parse_timestamp("2010-06-20T00:00:00Z");
  cfg.window_end = *parse_timestamp("2010-08-20T00:00:00Z");
  return cfg;
}

TEST_CASE("ipv4 parsing") {
  CHECK(*parse_ipv4("1.2.3.4") == 0x01020304u);
  CHECK(*parse_ipv4("0.0.0.0") == 0u);
  CHECK(*parse_ipv4("255.255.255.255") == 0xffffffffu);
  CHECK(!parse_ipv4("1.2.3.256"));
  CHECK(!parse_ipv4("1.2.3"));
  CHECK(!parse_ipv4("1.2.3.4.5"));
  CHECK(!parse_ipv4("1.2.3.04"));
  CHECK(!parse_ipv4("a.b.c.d"));
  CHECK(!parse_ipv4(""));
  CHECK(format_ipv4(0x01020304u) == "1.2.3.4");
}

TEST_CASE("timestamp parsing") {
  CHECK(*parse_timestamp("0") == 0);
  CHECK(*parse_timestamp("1277078400") == 1277078400);
  CHECK(*parse_timestamp("2010-06-21T00:00:00Z") == 1277078400);
  CHECK(*parse_timestamp("1970-01-01T00:00:00Z") == 0);
  CHECK(!parse_timestamp("not-a-time"));
  CHECK(!parse_timestamp(""));
  CHECK(format_timestamp(1277078400) == "2010-06-21T00:00:00Z");
}

TEST_CASE("validate_record accepts a clean row") {
  auto cfg = window_2010();
  auto v = validate_record({"a1", "2010-06-21T00:00:00Z", "1.2.3.4"}, cfg);
  REQUIRE(v.ok());
  CHECK(v.record->agent_id == "a1");
  CHECK(v.record->timestamp == 1277078400);
  CHECK(v.record->ip == 0x01020304u);
}

TEST_CASE("validate_record rejections") {
  auto cfg = window_2010();
  CHECK(validate_record({"a1", "2010-06-21T00:00:00Z", "1.2.3.256"}, cfg)
            .reason == RejectReason::malformed_ip);
  CHECK(validate_record({"a1", "2010-05-01T00:00:00Z", "1.2.3.4"}, cfg)
            .reason == RejectReason::outside_window);
  CHECK(validate_record({"", "2010-06-21T00:00:00Z", "1.2.3.4"}, cfg).reason ==
        RejectReason::empty_agent_id);
  CHECK(validate_record({"a1", "garbage", "1.2.3.4"}, cfg).reason ==
        RejectReason::bad_timestamp);
  CHECK(validate_record({"a1", "2010-06-21T00:00:00Z", "::1"}, cfg).reason ==
        RejectReason::ipv6_address);
}

TEST_CASE("config validity") {
  auto cfg = window_2010();
  CHECK(cfg.valid());
  cfg.gap_threshold = 0;
  CHECK(!cfg.valid());
  cfg = window_2010();
  cfg.sampling_period = cfg.gap_threshold;  // T must stay well under G
  CHECK(!cfg.valid());
}
