#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace churn {

// Seconds since Unix epoch, UTC.
using Timestamp = std::int64_t;
using Duration = std::int64_t;

constexpr Duration kSecond = 1;
constexpr Duration kMinute = 60;
constexpr Duration kHour = 3600;

// IPv4 address in host byte order.
using Ipv4 = std::uint32_t;

using AsNumber = std::uint32_t;
constexpr AsNumber kUnknownAs = 0xffffffffu;

std::optional<Ipv4> parse_ipv4(const std::string &text);
std::string format_ipv4(Ipv4 ip);

// Accepts integer epoch seconds or RFC 3339 UTC ("2010-06-21T00:00:00Z").
std::optional<Timestamp> parse_timestamp(const std::string &text);
std::string format_timestamp(Timestamp t);

struct AccessRecord {
  std::string agent_id;
  Timestamp timestamp = 0;
  Ipv4 ip = 0;

  bool operator==(const AccessRecord &) const = default;
};

struct AgentTrace {
  std::string agent_id;
  std::vector<AccessRecord> accesses;  // strictly ascending by timestamp
};

struct Interval {
  std::string agent_id;
  Ipv4 ip = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  AsNumber as_number = kUnknownAs;

  Duration length() const { return end - start; }
  bool operator==(const Interval &) const = default;
};

struct OnlineWindow {
  std::string agent_id;
  std::vector<Interval> intervals;  // ordered, non-overlapping
  Timestamp start = 0;
  Timestamp end = 0;
  // Single AS of the window after the multi-AS filter; kUnknownAs when no
  // interval IP resolves.
  AsNumber as_number = kUnknownAs;

  Duration length() const { return end - start; }
};

struct OfflineWindow {
  std::string agent_id;
  Timestamp start = 0;
  Timestamp end = 0;
  Ipv4 ip_before = 0;
  Ipv4 ip_after = 0;

  Duration length() const { return end - start; }
  bool ip_changed() const { return ip_before != ip_after; }
};

struct AnalysisConfig {
  Duration gap_threshold = 3 * kHour;   // G
  Duration sampling_period = kMinute;   // T
  int min_intervals_per_window = 4;     // "more than 3 intervals"
  std::vector<double> xi_thresholds = {0.5, 0.6, 0.8};
  Timestamp window_start = 0;
  Timestamp window_end = 0;

  Duration window_length() const { return window_end - window_start; }
  bool valid() const {
    return gap_threshold > 0 && sampling_period > 0 &&
           sampling_period < gap_threshold && window_end > window_start;
  }
};

enum class RejectReason {
  none,
  empty_agent_id,
  malformed_ip,
  ipv6_address,
  bad_timestamp,
  outside_window,
  bad_row,
};

const char *reject_reason_name(RejectReason r);

struct RawRecord {
  std::string agent_id;
  std::string timestamp;
  std::string ip;
};

struct ValidatedRecord {
  std::optional<AccessRecord> record;
  RejectReason reason = RejectReason::none;

  bool ok() const { return record.has_value(); }
};

ValidatedRecord validate_record(const RawRecord &raw, const AnalysisConfig &cfg);

}  // namespace churn
