#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "churn/as_map.hpp"
#include "churn/model.hpp"

namespace churn {

struct AsBlockSpec {
  AsNumber as_number = 0;
  std::string prefix;  // CIDR pool the block's IPs are drawn from
  std::size_t agent_count = 0;
  double fixed_fraction = 1.0;

  // Periodic agents change IP every lease_period; when unset, non-fixed
  // agents change at exponential interarrivals (sporadic model). A
  // non-positive sporadic mean disables spontaneous changes entirely, so the
  // agent only changes IP on reconnect.
  std::optional<double> lease_period_hours;
  double phase_jitter_minutes = 0.0;
  double sporadic_mean_change_hours = 24.0;

  double cadence_min_minutes = 30.0;
  double cadence_max_minutes = 60.0;

  // Offline episodes arrive as a Poisson process with the given per-day
  // probability; durations are uniform in [min, max] hours, or log-uniform
  // when offline_log_uniform is set (even coverage of log-spaced bins).
  double offline_per_day_probability = 0.0;
  double offline_min_hours = 4.0;
  double offline_max_hours = 48.0;
  bool offline_log_uniform = false;

  // Change-on-reconnect probability, interpolated in log-duration between
  // the value at the gap threshold and the value at >= 24 h offline.
  double change_at_gap = 0.5;
  double change_at_24h = 0.85;

  // NAT cluster: this many extra agents share one identical (single-IP) set,
  // so all but one are clones.
  std::size_t nat_cluster_size = 0;

  // Roaming agents alternate between this block and roam_prefix/roam_as
  // inside a single online window (their windows are multi-AS).
  std::size_t roaming_agent_count = 0;
  AsNumber roam_as_number = kUnknownAs;
  std::string roam_prefix;
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  Timestamp window_start = 0;
  double window_days = 10.0;
  std::vector<AsBlockSpec> blocks;
  // Server outages: accesses inside them are never observed.
  std::vector<std::pair<Timestamp, Timestamp>> server_downtimes;

  Timestamp window_end() const {
    return window_start + static_cast<Duration>(window_days * 24 * kHour);
  }

  static ScenarioSpec from_json_file(const std::string &path);
  static ScenarioSpec from_json_text(const std::string &text);
  // Throws std::runtime_error on contradictory parameters.
  void validate() const;
};

struct TruthInterval {
  Timestamp start = 0;
  Timestamp end = 0;
  Ipv4 ip = 0;

  Duration length() const { return end - start; }
};

struct AgentTruth {
  std::string agent_id;
  AsNumber as_number = kUnknownAs;
  bool fixed = false;
  bool periodic = false;
  std::optional<double> period_hours;
  bool clone = false;
  bool roaming = false;
  double percent_online = 0.0;
  std::vector<TruthInterval> intervals;  // IP holdings during online episodes
};

struct GroundTruth {
  std::string rng_name;
  std::uint64_t seed = 0;
  Timestamp window_start = 0;
  Timestamp window_end = 0;
  std::vector<AgentTruth> agents;
  std::vector<std::pair<std::string, AsNumber>> as_map_rows;  // prefix -> AS

  std::string to_json() const;
  static GroundTruth from_json_file(const std::string &path);
  static GroundTruth from_json_text(const std::string &text);
};

struct SynthOutput {
  std::vector<AccessRecord> log;  // sorted by agent_id, then timestamp
  GroundTruth truth;
};

// Deterministic under a fixed spec: identical seed, identical bytes out.
SynthOutput generate(const ScenarioSpec &spec);

void write_log_csv(const SynthOutput &out, std::ostream &os);
void write_as_map_csv(const GroundTruth &truth, std::ostream &os);

}  // namespace churn
