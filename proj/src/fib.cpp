#include "lpm6/fib.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace lpm6 {

namespace {

// Keep-mask for the top `length` bits of a 128-bit value.
u128 prefix_mask(int length) {
  if (length <= 0) return 0;
  return ~u128(0) << (128 - length);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

u128 parse_ipv6(std::string_view text) {
  if (text.empty() || text.size() > 45)
    throw Error(Errc::MalformedAddress, "malformed IPv6 address: '" + std::string(text) + "'");
  char buf[46];
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';
  in6_addr addr;
  if (inet_pton(AF_INET6, buf, &addr) != 1)
    throw Error(Errc::MalformedAddress, "malformed IPv6 address: '" + std::string(text) + "'");
  u128 v = 0;
  for (int i = 0; i < 16; ++i) v = (v << 8) | addr.s6_addr[i];
  return v;
}

std::string format_ipv6(u128 addr) {
  in6_addr raw;
  for (int i = 15; i >= 0; --i) {
    raw.s6_addr[i] = static_cast<u8>(addr & 0xFF);
    addr >>= 8;
  }
  char buf[INET6_ADDRSTRLEN];
  if (!inet_ntop(AF_INET6, &raw, buf, sizeof buf))
    throw Error(Errc::MalformedAddress, "unformattable IPv6 address");
  return buf;
}

KeyRange prefix_to_range(const Prefix& p) {
  const u64 start = p.top64();
  const u128 width = u128(1) << (64 - p.length);
  return KeyRange{start, u128(start) + width};
}

ParsedPrefix parse_prefix(std::string_view text) {
  const auto fields = split_fields(text);
  if (fields.empty())
    throw Error(Errc::MalformedAddress, "empty rule");
  const std::string_view rule = fields[0];
  const size_t slash = rule.rfind('/');
  if (slash == std::string_view::npos)
    throw Error(Errc::MalformedAddress, "missing '/<len>' in '" + std::string(rule) + "'");

  const u128 value = parse_ipv6(rule.substr(0, slash));

  const std::string_view len_str = rule.substr(slash + 1);
  int length = -1;
  auto [lp, lec] = std::from_chars(len_str.begin(), len_str.end(), length);
  if (lec != std::errc() || lp != len_str.end() || length < 0 || length > 128)
    throw Error(Errc::MalformedAddress, "bad prefix length '" + std::string(len_str) + "'");
  if (length > 64)
    throw Error(Errc::UnsupportedPrefixLength,
                "unsupported prefix length /" + std::to_string(length) + " (keys cover /0../64)");

  if (fields.size() < 2)
    throw Error(Errc::MissingNextHop, "missing next hop in '" + std::string(text) + "'");
  if (fields.size() > 2)
    throw Error(Errc::MalformedAddress, "trailing tokens in '" + std::string(text) + "'");
  u32 next_hop = 0;
  auto [np, nec] = std::from_chars(fields[1].begin(), fields[1].end(), next_hop);
  if (nec != std::errc() || np != fields[1].end())
    throw Error(Errc::MissingNextHop, "bad next hop '" + std::string(fields[1]) + "'");
  if (next_hop == kUnresolved)
    throw Error(Errc::ReservedNextHop, "next hop 4294967295 is reserved");

  const u128 masked = value & prefix_mask(length);
  return ParsedPrefix{Prefix{masked, length, next_hop}, masked != value};
}

std::string format_prefix(const Prefix& p) {
  return format_ipv6(p.value) + "/" + std::to_string(p.length) + " " + std::to_string(p.next_hop);
}

bool FibTable::contains(u128 value, int length) const {
  return index_.count(key_of(value, length)) != 0;
}

const Prefix* FibTable::find(u128 value, int length) const {
  auto it = index_.find(key_of(value, length));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void FibTable::insert(const Prefix& p) {
  if (p.next_hop == kUnresolved)
    throw Error(Errc::ReservedNextHop, "next hop 4294967295 is reserved");
  auto [it, fresh] = index_.try_emplace(key_of(p.value, p.length), entries_.size());
  if (!fresh)
    throw Error(Errc::DuplicatePrefix, "duplicate prefix " + format_prefix(p));
  entries_.push_back(p);
}

bool FibTable::insert_or_replace(const Prefix& p) {
  if (p.next_hop == kUnresolved)
    throw Error(Errc::ReservedNextHop, "next hop 4294967295 is reserved");
  auto [it, fresh] = index_.try_emplace(key_of(p.value, p.length), entries_.size());
  if (fresh) {
    entries_.push_back(p);
    return false;
  }
  entries_[it->second] = p;
  return true;
}

void FibTable::erase(u128 value, int length) {
  auto it = index_.find(key_of(value, length));
  if (it == index_.end())
    throw Error(Errc::UnknownPrefix,
                "no such prefix " + format_ipv6(value) + "/" + std::to_string(length));
  const size_t pos = it->second;
  index_.erase(it);
  if (pos != entries_.size() - 1) {
    entries_[pos] = entries_.back();
    index_[key_of(entries_[pos].value, entries_[pos].length)] = pos;
  }
  entries_.pop_back();
}

void FibTable::modify(u128 value, int length, u32 next_hop) {
  if (next_hop == kUnresolved)
    throw Error(Errc::ReservedNextHop, "next hop 4294967295 is reserved");
  auto it = index_.find(key_of(value, length));
  if (it == index_.end())
    throw Error(Errc::UnknownPrefix,
                "no such prefix " + format_ipv6(value) + "/" + std::to_string(length));
  entries_[it->second].next_hop = next_hop;
}

FibTable load_fib(std::istream& in, LoadStats* stats) {
  FibTable fib;
  LoadStats local;
  std::string line;
  u64 line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s(line);
    if (const size_t hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    bool blank = true;
    for (char c : s)
      if (!is_space(c)) { blank = false; break; }
    if (blank) continue;
    ++local.lines;
    try {
      const ParsedPrefix parsed = parse_prefix(s);
      if (parsed.host_bits_masked) ++local.masked;
      if (fib.insert_or_replace(parsed.prefix)) ++local.duplicates;
    } catch (const Error& e) {
      if (e.code() == Errc::UnsupportedPrefixLength) {
        ++local.too_long;
        continue;
      }
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  local.rules = fib.size();
  if (stats) *stats = local;
  return fib;
}

FibTable load_fib_file(const std::string& path, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open FIB file '" + path + "'");
  return load_fib(in, stats);
}

void save_fib(const FibTable& fib, std::ostream& out) {
  for (const Prefix& p : fib.entries()) out << format_prefix(p) << '\n';
}

LengthDistribution LengthDistribution::backbone_default(u64 seed) {
  LengthDistribution d;
  d.seed = seed;
  d.weights[48] = 0.4455;
  d.weights[32] = 0.1100;
  d.weights[40] = 0.1011;
  d.weights[44] = 0.0969;
  d.weights[36] = 0.0389;
  double assigned = 0.0;
  for (double w : d.weights) assigned += w;
  int tail_lengths = 0;
  for (int len = 20; len <= 64; ++len)
    if (d.weights[len] == 0.0) ++tail_lengths;
  const double tail = (1.0 - assigned) / tail_lengths;
  for (int len = 20; len <= 64; ++len)
    if (d.weights[len] == 0.0) d.weights[len] = tail;
  return d;
}

void LengthDistribution::validate() const {
  double sum = 0.0;
  for (int len = 0; len <= 64; ++len) {
    if (weights[len] < 0.0)
      throw Error(Errc::InvalidArgument, "negative weight for length " + std::to_string(len));
    sum += weights[len];
  }
  if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
    throw Error(Errc::InvalidArgument, "length weights sum to " + std::to_string(sum));
}

FibTable synth_fib(u64 n, const LengthDistribution& dist) {
  if (n < 1) throw Error(Errc::InvalidArgument, "need n >= 1");
  dist.validate();

  std::array<double, 65> cum{};
  double run = 0.0;
  for (int len = 0; len <= 64; ++len) {
    run += dist.weights[len];
    cum[len] = run;
  }

  std::mt19937_64 rng(dist.seed);
  auto draw_length = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return it == cum.end() ? 64 : static_cast<int>(it - cum.begin());
  };

  FibTable fib;
  std::unordered_set<PrefixKey, PrefixKeyHash> seen;
  seen.reserve(n * 2);
  // A draw can collide with an earlier prefix; resample within a bounded
  // budget so a too-narrow distribution fails instead of spinning.
  const u64 max_attempts = 64 * n + 4096;
  u64 attempts = 0;
  while (fib.size() < n) {
    if (++attempts > max_attempts)
      throw Error(Errc::ExhaustedPrefixSpace,
                  "cannot draw " + std::to_string(n) + " unique prefixes from this distribution");
    const int len = draw_length();
    const u64 top = len == 0 ? 0 : (rng() & (len == 64 ? ~u64(0) : ~u64(0) << (64 - len)));
    if (!seen.insert(PrefixKey{top, len}).second) continue;
    const u32 next_hop = static_cast<u32>(rng() % 64) + 1;
    fib.insert(Prefix{u128(top) << 64, len, next_hop});
  }
  return fib;
}

}  // namespace lpm6
