#include "churn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "churn/rng.hpp"
#include "json.hpp"

namespace churn {

using nlohmann::json;

static double get_or(const json &j, const char *key, double dflt) {
  return j.contains(key) ? j[key].get<double>() : dflt;
}

ScenarioSpec ScenarioSpec::from_json_text(const std::string &text) {
  json j = json::parse(text);
  ScenarioSpec spec;
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("window_start")) {
    const auto &ws = j["window_start"];
    if (ws.is_string()) {
      auto t = parse_timestamp(ws.get<std::string>());
      if (!t) throw std::runtime_error("scenario: bad window_start");
      spec.window_start = *t;
    } else {
      spec.window_start = ws.get<Timestamp>();
    }
  }
  spec.window_days = j.value("window_days", 10.0);
  for (const auto &b : j.value("blocks", json::array())) {
    AsBlockSpec blk;
    blk.as_number = b.at("as_number").get<AsNumber>();
    blk.prefix = b.at("prefix").get<std::string>();
    blk.agent_count = b.value("agent_count", std::size_t{0});
    blk.fixed_fraction = get_or(b, "fixed_fraction", 1.0);
    if (b.contains("lease_period_hours") && !b["lease_period_hours"].is_null())
      blk.lease_period_hours = b["lease_period_hours"].get<double>();
    blk.phase_jitter_minutes = get_or(b, "phase_jitter_minutes", 0.0);
    blk.sporadic_mean_change_hours = get_or(b, "sporadic_mean_change_hours", 24.0);
    blk.cadence_min_minutes = get_or(b, "cadence_min_minutes", 30.0);
    blk.cadence_max_minutes = get_or(b, "cadence_max_minutes", 60.0);
    blk.offline_per_day_probability = get_or(b, "offline_per_day_probability", 0.0);
    blk.offline_min_hours = get_or(b, "offline_min_hours", 4.0);
    blk.offline_max_hours = get_or(b, "offline_max_hours", 48.0);
    blk.offline_log_uniform = b.value("offline_log_uniform", false);
    blk.change_at_gap = get_or(b, "change_at_gap", 0.5);
    blk.change_at_24h = get_or(b, "change_at_24h", 0.85);
    blk.nat_cluster_size = b.value("nat_cluster_size", std::size_t{0});
    blk.roaming_agent_count = b.value("roaming_agent_count", std::size_t{0});
    if (b.contains("roam_as_number"))
      blk.roam_as_number = b["roam_as_number"].get<AsNumber>();
    blk.roam_prefix = b.value("roam_prefix", std::string{});
    spec.blocks.push_back(std::move(blk));
  }
  for (const auto &d : j.value("server_downtimes", json::array())) {
    double sh = d.at("start_hours").get<double>();
    double dh = d.at("duration_hours").get<double>();
    Timestamp s = spec.window_start + static_cast<Duration>(sh * kHour);
    spec.server_downtimes.emplace_back(s, s + static_cast<Duration>(dh * kHour));
  }
  spec.validate();
  return spec;
}

ScenarioSpec ScenarioSpec::from_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void ScenarioSpec::validate() const {
  if (window_days <= 0) throw std::runtime_error("scenario: window_days <= 0");
  if (blocks.empty()) throw std::runtime_error("scenario: no blocks");
  const double window_hours = window_days * 24.0;
  for (const auto &b : blocks) {
    if (!parse_cidr(b.prefix))
      throw std::runtime_error("scenario: bad prefix " + b.prefix);
    if (b.fixed_fraction < 0.0 || b.fixed_fraction > 1.0)
      throw std::runtime_error("scenario: fixed_fraction out of [0,1]");
    if (b.lease_period_hours) {
      if (*b.lease_period_hours <= 0)
        throw std::runtime_error("scenario: lease period <= 0");
      if (*b.lease_period_hours >= window_hours)
        throw std::runtime_error("scenario: lease period exceeds window");
    }
    if (b.cadence_min_minutes <= 0 ||
        b.cadence_max_minutes < b.cadence_min_minutes)
      throw std::runtime_error("scenario: bad cadence range");
    if (b.roaming_agent_count > 0 && !parse_cidr(b.roam_prefix))
      throw std::runtime_error("scenario: roaming agents need roam_prefix");
  }
}

namespace {

struct Episode {
  Timestamp start, end;
};

struct Change {
  Timestamp at;
  bool forced_new_ip;  // reconnect change already decided
};

Ipv4 pool_base(const std::string &prefix) {
  return parse_cidr(prefix)->first;
}

std::uint64_t pool_size(const std::string &prefix) {
  int len = parse_cidr(prefix)->second;
  return std::uint64_t{1} << (32 - len);
}

Ipv4 draw_ip(Rng &rng, const std::string &prefix, Ipv4 avoid) {
  Ipv4 base = pool_base(prefix);
  std::uint64_t n = pool_size(prefix);
  for (int tries = 0; tries < 64; ++tries) {
    Ipv4 ip = base + static_cast<Ipv4>(rng.uniform_int(
                         1, static_cast<std::int64_t>(n) - 2));
    if (ip != avoid) return ip;
  }
  return base + 1;
}

std::vector<Episode> make_episodes(Rng &rng, const AsBlockSpec &blk,
                                   Timestamp ws, Timestamp we) {
  if (blk.offline_per_day_probability <= 0.0) return {{ws, we}};
  std::vector<Episode> episodes;
  const double mean_gap_s = 24.0 * kHour / blk.offline_per_day_probability;
  Timestamp online_start = ws;
  while (online_start < we) {
    Timestamp off_at = online_start +
                       static_cast<Duration>(rng.exponential(mean_gap_s));
    if (off_at >= we) {
      episodes.push_back({online_start, we});
      break;
    }
    if (off_at > online_start) episodes.push_back({online_start, off_at});
    double dur_h =
        blk.offline_log_uniform
            ? std::exp(rng.uniform(std::log(blk.offline_min_hours),
                                   std::log(blk.offline_max_hours)))
            : rng.uniform(blk.offline_min_hours, blk.offline_max_hours);
    online_start = off_at + static_cast<Duration>(dur_h * kHour);
  }
  return episodes;
}

double reconnect_change_probability(const AsBlockSpec &blk, Duration offline,
                                    Duration gap_threshold) {
  const double d = static_cast<double>(offline);
  const double lo = static_cast<double>(gap_threshold);
  const double hi = 24.0 * kHour;
  if (d <= lo) return blk.change_at_gap;
  if (d >= hi) return blk.change_at_24h;
  const double f = (std::log(d) - std::log(lo)) / (std::log(hi) - std::log(lo));
  return blk.change_at_gap + f * (blk.change_at_24h - blk.change_at_gap);
}

struct AgentPlan {
  AgentTruth truth;
  std::vector<AccessRecord> accesses;
};

bool in_downtime(const std::vector<std::pair<Timestamp, Timestamp>> &downs,
                 Timestamp t) {
  for (const auto &[s, e] : downs)
    if (t >= s && t < e) return true;
  return false;
}

AgentPlan build_agent(const ScenarioSpec &spec, const AsBlockSpec &blk,
                      const std::string &agent_id, Rng rng, bool fixed,
                      bool clone, bool roaming, Ipv4 assigned_ip) {
  const Timestamp ws = spec.window_start;
  const Timestamp we = spec.window_end();

  AgentPlan plan;
  plan.truth.agent_id = agent_id;
  plan.truth.as_number = roaming ? kUnknownAs : blk.as_number;
  plan.truth.fixed = fixed;
  plan.truth.clone = clone;
  plan.truth.roaming = roaming;

  auto episodes = make_episodes(rng, blk, ws, we);

  // IP-change instants over the whole window
  std::vector<Change> changes;
  if (roaming) {
    // hop between the two ASes every couple of hours inside one window
    for (Timestamp t = ws + 2 * kHour; t < we; t += 2 * kHour)
      changes.push_back({t, true});
  } else if (!fixed) {
    if (blk.lease_period_hours) {
      plan.truth.periodic = true;
      plan.truth.period_hours = *blk.lease_period_hours;
      const double period_s = *blk.lease_period_hours * kHour;
      const double sigma_s = blk.phase_jitter_minutes * kMinute;
      const double phase0 = rng.uniform(0.0, period_s);
      for (double base = static_cast<double>(ws) + phase0;
           base < static_cast<double>(we); base += period_s) {
        double jitter =
            sigma_s > 0.0
                ? rng.truncated_gaussian(0.0, sigma_s, -period_s / 4,
                                         period_s / 4)
                : 0.0;
        Timestamp at = static_cast<Timestamp>(base + jitter);
        if (at > ws && at < we) changes.push_back({at, false});
      }
    } else if (blk.sporadic_mean_change_hours > 0) {
      const double mean_s = blk.sporadic_mean_change_hours * kHour;
      for (double t = static_cast<double>(ws) + rng.exponential(mean_s);
           t < static_cast<double>(we); t += rng.exponential(mean_s))
        changes.push_back({static_cast<Timestamp>(t), false});
    }
    // reconnect changes after each offline gap
    for (std::size_t e = 1; e < episodes.size(); ++e) {
      Duration off = episodes[e].start - episodes[e - 1].end;
      double p = reconnect_change_probability(blk, off, 3 * kHour);
      if (rng.bernoulli(p)) changes.push_back({episodes[e].start, true});
    }
    std::sort(changes.begin(), changes.end(),
              [](const Change &a, const Change &b) { return a.at < b.at; });
    changes.erase(std::unique(changes.begin(), changes.end(),
                              [](const Change &a, const Change &b) {
                                return a.at == b.at;
                              }),
                  changes.end());
  }

  // IP per segment
  std::vector<std::pair<Timestamp, Ipv4>> segments;  // start -> ip
  Ipv4 ip = assigned_ip;
  bool roam_side = false;
  if (!fixed && !roaming && ip == 0) ip = draw_ip(rng, blk.prefix, 0);
  Ipv4 roam_ip = roaming ? draw_ip(rng, blk.roam_prefix, 0) : 0;
  segments.emplace_back(ws, ip);
  for (const auto &c : changes) {
    if (roaming) {
      roam_side = !roam_side;
      segments.emplace_back(c.at, roam_side ? roam_ip : ip);
    } else {
      ip = draw_ip(rng, blk.prefix, ip);
      segments.emplace_back(c.at, ip);
    }
  }

  auto ip_at = [&](Timestamp t) {
    auto it = std::upper_bound(
        segments.begin(), segments.end(), t,
        [](Timestamp v, const std::pair<Timestamp, Ipv4> &s) {
          return v < s.first;
        });
    return std::prev(it)->second;
  };

  // truth intervals: segments intersected with online episodes
  Duration online_total = 0;
  for (const auto &ep : episodes) {
    online_total += ep.end - ep.start;
    std::size_t si = 0;
    while (si < segments.size()) {
      Timestamp seg_start = segments[si].first;
      Timestamp seg_end =
          si + 1 < segments.size() ? segments[si + 1].first : we;
      Timestamp s = std::max(seg_start, ep.start);
      Timestamp e = std::min(seg_end, ep.end);
      if (s < e)
        plan.truth.intervals.push_back(TruthInterval{s, e, segments[si].second});
      ++si;
    }
  }
  plan.truth.percent_online =
      static_cast<double>(online_total) / static_cast<double>(we - ws);

  // accesses
  for (const auto &ep : episodes) {
    Timestamp t = ep.start;
    while (t <= ep.end) {
      if (!in_downtime(spec.server_downtimes, t))
        plan.accesses.push_back(AccessRecord{agent_id, t, ip_at(t)});
      double step_min =
          rng.uniform(blk.cadence_min_minutes, blk.cadence_max_minutes);
      t += std::max<Duration>(1, static_cast<Duration>(step_min * kMinute));
    }
  }
  return plan;
}

}  // namespace

SynthOutput generate(const ScenarioSpec &spec) {
  spec.validate();
  SynthOutput out;
  out.truth.rng_name = Rng::kName;
  out.truth.seed = spec.seed;
  out.truth.window_start = spec.window_start;
  out.truth.window_end = spec.window_end();

  Rng root(spec.seed);
  std::uint64_t agent_counter = 0;

  for (const auto &blk : spec.blocks) {
    out.truth.as_map_rows.emplace_back(blk.prefix, blk.as_number);
    if (blk.roaming_agent_count > 0 && !blk.roam_prefix.empty())
      out.truth.as_map_rows.emplace_back(blk.roam_prefix, blk.roam_as_number);

    const std::size_t fixed_count = static_cast<std::size_t>(
        std::llround(blk.fixed_fraction * static_cast<double>(blk.agent_count)));
    Ipv4 base = pool_base(blk.prefix);
    Ipv4 next_fixed_host = 1;

    auto agent_name = [&](const char *role, std::size_t i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "as%u-%s%04zu", blk.as_number, role, i);
      return std::string(buf);
    };

    for (std::size_t i = 0; i < blk.agent_count; ++i) {
      bool fixed = i < fixed_count;
      Ipv4 assigned = fixed ? base + next_fixed_host++ : 0;
      auto plan = build_agent(spec, blk, agent_name(fixed ? "f" : "d", i),
                              root.fork(agent_counter++), fixed, false, false,
                              assigned);
      out.truth.agents.push_back(std::move(plan.truth));
      out.log.insert(out.log.end(), plan.accesses.begin(), plan.accesses.end());
    }
    if (blk.nat_cluster_size > 0) {
      Ipv4 nat_ip = base + next_fixed_host++;
      for (std::size_t i = 0; i < blk.nat_cluster_size; ++i) {
        auto plan = build_agent(spec, blk, agent_name("n", i),
                                root.fork(agent_counter++), true, true, false,
                                nat_ip);
        out.truth.agents.push_back(std::move(plan.truth));
        out.log.insert(out.log.end(), plan.accesses.begin(),
                       plan.accesses.end());
      }
    }
    for (std::size_t i = 0; i < blk.roaming_agent_count; ++i) {
      auto plan = build_agent(spec, blk, agent_name("r", i),
                              root.fork(agent_counter++), false, false, true,
                              base + next_fixed_host++);
      out.truth.agents.push_back(std::move(plan.truth));
      out.log.insert(out.log.end(), plan.accesses.begin(), plan.accesses.end());
    }
  }

  std::sort(out.log.begin(), out.log.end(),
            [](const AccessRecord &a, const AccessRecord &b) {
              if (a.agent_id != b.agent_id) return a.agent_id < b.agent_id;
              return a.timestamp < b.timestamp;
            });
  std::sort(out.truth.agents.begin(), out.truth.agents.end(),
            [](const AgentTruth &a, const AgentTruth &b) {
              return a.agent_id < b.agent_id;
            });
  return out;
}

void write_log_csv(const SynthOutput &out, std::ostream &os) {
  os << "agent_id,timestamp,ip\n";
  for (const auto &r : out.log)
    os << r.agent_id << ',' << r.timestamp << ',' << format_ipv4(r.ip) << '\n';
}

void write_as_map_csv(const GroundTruth &truth, std::ostream &os) {
  os << "prefix,asn\n";
  for (const auto &[prefix, as] : truth.as_map_rows)
    os << prefix << ',' << as << '\n';
}

std::string GroundTruth::to_json() const {
  json j;
  j["rng"] = rng_name;
  j["seed"] = seed;
  j["window_start"] = window_start;
  j["window_end"] = window_end;
  json rows = json::array();
  for (const auto &[prefix, as] : as_map_rows)
    rows.push_back({{"prefix", prefix}, {"asn", as}});
  j["as_map"] = rows;
  json agents = json::array();
  for (const auto &a : this->agents) {
    json ja;
    ja["agent_id"] = a.agent_id;
    if (a.as_number != kUnknownAs) ja["as_number"] = a.as_number;
    ja["fixed"] = a.fixed;
    ja["periodic"] = a.periodic;
    if (a.period_hours) ja["period_hours"] = *a.period_hours;
    ja["clone"] = a.clone;
    ja["roaming"] = a.roaming;
    ja["percent_online"] = a.percent_online;
    json ivs = json::array();
    for (const auto &iv : a.intervals)
      ivs.push_back({{"start", iv.start}, {"end", iv.end},
                     {"ip", format_ipv4(iv.ip)}});
    ja["intervals"] = ivs;
    agents.push_back(std::move(ja));
  }
  j["agents"] = agents;
  return j.dump(2) + "\n";
}

GroundTruth GroundTruth::from_json_text(const std::string &text) {
  json j = json::parse(text);
  GroundTruth t;
  t.rng_name = j.value("rng", std::string{});
  t.seed = j.value("seed", std::uint64_t{0});
  t.window_start = j.value("window_start", Timestamp{0});
  t.window_end = j.value("window_end", Timestamp{0});
  for (const auto &r : j.value("as_map", json::array()))
    t.as_map_rows.emplace_back(r.at("prefix").get<std::string>(),
                               r.at("asn").get<AsNumber>());
  for (const auto &ja : j.value("agents", json::array())) {
    AgentTruth a;
    a.agent_id = ja.at("agent_id").get<std::string>();
    if (ja.contains("as_number")) a.as_number = ja["as_number"].get<AsNumber>();
    a.fixed = ja.value("fixed", false);
    a.periodic = ja.value("periodic", false);
    if (ja.contains("period_hours"))
      a.period_hours = ja["period_hours"].get<double>();
    a.clone = ja.value("clone", false);
    a.roaming = ja.value("roaming", false);
    a.percent_online = ja.value("percent_online", 0.0);
    for (const auto &iv : ja.value("intervals", json::array())) {
      auto ip = parse_ipv4(iv.at("ip").get<std::string>());
      a.intervals.push_back(TruthInterval{iv.at("start").get<Timestamp>(),
                                          iv.at("end").get<Timestamp>(),
                                          ip.value_or(0)});
    }
    t.agents.push_back(std::move(a));
  }
  return t;
}

GroundTruth GroundTruth::from_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("truth: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace churn
