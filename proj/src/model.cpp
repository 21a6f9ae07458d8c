#include "churn/model.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>

namespace churn {

std::optional<Ipv4> parse_ipv4(const std::string &text) {
  std::uint32_t octets[4];
  const char *p = text.data();
  const char *end = p + text.size();
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    if (p == end || !std::isdigit(static_cast<unsigned char>(*p)))
      return std::nullopt;
    // no leading zeros beyond a lone "0"
    if (*p == '0' && p + 1 != end && std::isdigit(static_cast<unsigned char>(p[1])))
      return std::nullopt;
    std::uint32_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || v > 255) return std::nullopt;
    octets[i] = v;
    p = next;
  }
  if (p != end) return std::nullopt;
  return (octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3];
}

std::string format_ipv4(Ipv4 ip) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff,
                (ip >> 16) & 0xff, (ip >> 8) & 0xff, ip & 0xff);
  return buf;
}

static bool looks_like_ipv6(const std::string &text) {
  return text.find(':') != std::string::npos;
}

std::optional<Timestamp> parse_timestamp(const std::string &text) {
  if (text.empty()) return std::nullopt;
  // integer epoch seconds
  bool all_digits = true;
  std::size_t i = (text[0] == '-') ? 1 : 0;
  if (i >= text.size()) return std::nullopt;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      all_digits = false;
      break;
    }
  }
  if (all_digits) {
    Timestamp v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
    return v;
  }
  // RFC 3339, UTC only: YYYY-MM-DDTHH:MM:SSZ (or trailing "+00:00")
  int year, mon, day, hour, min, sec;
  char sep, tail;
  int n = std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%c", &year, &mon,
                      &day, &sep, &hour, &min, &sec, &tail);
  if (n < 7 || (sep != 'T' && sep != 't' && sep != ' ')) return std::nullopt;
  if (n == 8 && tail != 'Z' && tail != 'z' && tail != '+') return std::nullopt;
  if (n == 8 && tail == '+' && text.substr(text.size() - 6) != "+00:00")
    return std::nullopt;
  if (mon < 1 || mon > 12 || day < 1 || day > 31 || hour > 23 || min > 59 ||
      sec > 60)
    return std::nullopt;
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = sec;
  return static_cast<Timestamp>(timegm(&tm));
}

std::string format_timestamp(Timestamp t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

const char *reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::empty_agent_id: return "empty_agent_id";
    case RejectReason::malformed_ip: return "malformed_ip";
    case RejectReason::ipv6_address: return "ipv6_address";
    case RejectReason::bad_timestamp: return "bad_timestamp";
    case RejectReason::outside_window: return "outside_window";
    case RejectReason::bad_row: return "bad_row";
  }
  return "unknown";
}

ValidatedRecord validate_record(const RawRecord &raw, const AnalysisConfig &cfg) {
  if (raw.agent_id.empty()) return {std::nullopt, RejectReason::empty_agent_id};
  auto ts = parse_timestamp(raw.timestamp);
  if (!ts) return {std::nullopt, RejectReason::bad_timestamp};
  if (*ts < cfg.window_start || *ts > cfg.window_end)
    return {std::nullopt, RejectReason::outside_window};
  if (looks_like_ipv6(raw.ip)) return {std::nullopt, RejectReason::ipv6_address};
  auto ip = parse_ipv4(raw.ip);
  if (!ip) return {std::nullopt, RejectReason::malformed_ip};
  return {AccessRecord{raw.agent_id, *ts, *ip}, RejectReason::none};
}

}  // namespace churn
