#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>

#include "churn/model.hpp"

namespace churn {

// Longest-prefix-match table from IPv4 CIDR prefixes to AS numbers, with an
// optional class label per AS (academic / tier-1 / tier-2 / unresolved).
class IpAsMap {
 public:
  void add_prefix(Ipv4 network, int prefix_len, AsNumber as,
                  const std::string &cls = "");

  // kUnknownAs when no prefix covers ip.
  AsNumber resolve(Ipv4 ip) const;

  std::string as_class(AsNumber as) const;

  std::size_t prefix_count() const { return prefixes_.size(); }

  // CSV rows "prefix,asn[,class]". Throws std::runtime_error on a malformed
  // row.
  static IpAsMap load_csv(std::istream &in);
  static IpAsMap load_csv_file(const std::string &path);

 private:
  // Keyed by (prefix_len, network); resolve scans lengths from /32 down.
  std::map<std::pair<int, Ipv4>, AsNumber> prefixes_;
  std::map<AsNumber, std::string> classes_;
};

std::optional<std::pair<Ipv4, int>> parse_cidr(const std::string &text);

}  // namespace churn
