#include "churn/as_map.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace churn {

static Ipv4 mask_for(int prefix_len) {
  if (prefix_len == 0) return 0;
  return ~Ipv4{0} << (32 - prefix_len);
}

std::optional<std::pair<Ipv4, int>> parse_cidr(const std::string &text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return std::nullopt;
  auto ip = parse_ipv4(text.substr(0, slash));
  if (!ip) return std::nullopt;
  int len = -1;
  const char *p = text.data() + slash + 1;
  const char *end = text.data() + text.size();
  auto [next, ec] = std::from_chars(p, end, len);
  if (ec != std::errc{} || next != end || len < 0 || len > 32)
    return std::nullopt;
  return std::make_pair(*ip & mask_for(len), len);
}

void IpAsMap::add_prefix(Ipv4 network, int prefix_len, AsNumber as,
                         const std::string &cls) {
  prefixes_[{prefix_len, network & mask_for(prefix_len)}] = as;
  if (!cls.empty()) classes_[as] = cls;
}

AsNumber IpAsMap::resolve(Ipv4 ip) const {
  for (int len = 32; len >= 0; --len) {
    auto it = prefixes_.find({len, ip & mask_for(len)});
    if (it != prefixes_.end()) return it->second;
  }
  return kUnknownAs;
}

std::string IpAsMap::as_class(AsNumber as) const {
  auto it = classes_.find(as);
  return it == classes_.end() ? std::string{} : it->second;
}

IpAsMap IpAsMap::load_csv(std::istream &in) {
  IpAsMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("prefix", 0) == 0) continue;  // header
    std::stringstream ss(line);
    std::string prefix, asn, cls;
    std::getline(ss, prefix, ',');
    std::getline(ss, asn, ',');
    std::getline(ss, cls, ',');
    auto cidr = parse_cidr(prefix);
    AsNumber as = kUnknownAs;
    auto [p, ec] = std::from_chars(asn.data(), asn.data() + asn.size(), as);
    if (!cidr || ec != std::errc{} || p != asn.data() + asn.size())
      throw std::runtime_error("as-map: malformed row " + std::to_string(lineno) +
                               ": " + line);
    map.add_prefix(cidr->first, cidr->second, as, cls);
  }
  return map;
}

IpAsMap IpAsMap::load_csv_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("as-map: cannot open " + path);
  return load_csv(in);
}

}  // namespace churn
