#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lpm6/types.hpp"

namespace lpm6 {

// One forwarding rule. `value` is the 128-bit address as an integer (text
// order, i.e. the first hextet is the most significant). Only the top
// `length` bits are meaningful; everything below is kept zero (canonical
// form). Lengths are capped at 64 because lookup keys are the top 64 bits
// of the address space.
struct Prefix {
  u128 value = 0;
  int length = 0;  // 0..64
  u32 next_hop = 0;

  u64 top64() const { return static_cast<u64>(value >> 64); }
  friend bool operator==(const Prefix&, const Prefix&) = default;
};

// Half-open range [start_key, end_exclusive) covered by a prefix on the
// 64-bit key space. end_exclusive can be 2^64, hence the wider type.
struct KeyRange {
  u64 start_key = 0;
  u128 end_exclusive = 0;

  u128 width() const { return end_exclusive - start_key; }
};

KeyRange prefix_to_range(const Prefix& p);

u128 parse_ipv6(std::string_view text);
std::string format_ipv6(u128 addr);

struct ParsedPrefix {
  Prefix prefix;
  // Input had bits set below the prefix length; they were masked off.
  bool host_bits_masked = false;
};

// "<ipv6>/<len> <next_hop>", e.g. "2001:db8::/32 1".
ParsedPrefix parse_prefix(std::string_view text);
std::string format_prefix(const Prefix& p);

// Unique key of a rule. Prefixes are canonical, so the top 64 bits plus
// the length identify the rule completely.
struct PrefixKey {
  u64 top = 0;
  int length = 0;
  friend bool operator==(const PrefixKey&, const PrefixKey&) = default;
};

struct PrefixKeyHash {
  size_t operator()(const PrefixKey& k) const noexcept {
    u64 x = k.top ^ (u64(k.length) << 56);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return static_cast<size_t>(x);
  }
};

// Ordered rule set with no duplicate (value, length) pairs.
class FibTable {
 public:
  FibTable() = default;
  explicit FibTable(u32 default_next_hop) : default_next_hop_(default_next_hop) {}

  u32 default_next_hop() const { return default_next_hop_; }
  void set_default_next_hop(u32 nh) { default_next_hop_ = nh; }

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const Prefix> entries() const { return entries_; }

  bool contains(u128 value, int length) const;
  const Prefix* find(u128 value, int length) const;

  // Throws DuplicatePrefix if (value, length) is already present.
  void insert(const Prefix& p);
  // Returns true when an existing rule was overwritten.
  bool insert_or_replace(const Prefix& p);
  // Throw UnknownPrefix when absent.
  void erase(u128 value, int length);
  void modify(u128 value, int length, u32 next_hop);

 private:
  static PrefixKey key_of(u128 value, int length) {
    return PrefixKey{static_cast<u64>(value >> 64), length};
  }

  std::vector<Prefix> entries_;
  std::unordered_map<PrefixKey, size_t, PrefixKeyHash> index_;
  u32 default_next_hop_ = 0;
};

struct LoadStats {
  u64 lines = 0;        // non-blank, non-comment lines seen
  u64 rules = 0;        // rules in the resulting table
  u64 duplicates = 0;   // lines superseded by a later duplicate
  u64 masked = 0;       // lines whose host bits were masked off
  u64 too_long = 0;     // lines rejected for length > 64
};

// Text format: one rule per line, '#' starts a comment, blank lines
// ignored. Duplicate (value, length) lines: last occurrence wins. Lines
// with length > 64 are counted and skipped; other parse errors throw with
// the line number.
FibTable load_fib(std::istream& in, LoadStats* stats = nullptr);
FibTable load_fib_file(const std::string& path, LoadStats* stats = nullptr);
void save_fib(const FibTable& fib, std::ostream& out);

// Probability weights per prefix length. The default models a 2025
// backbone table: the five dominant lengths at their observed shares and
// the remainder spread over the other backbone lengths.
struct LengthDistribution {
  std::array<double, 65> weights{};
  u64 seed = 0;

  static LengthDistribution backbone_default(u64 seed = 0);
  void validate() const;  // weights >= 0, sum == 1 within 1e-9
};

// n unique prefixes with lengths drawn from `dist` and values uniform over
// the canonical values of the drawn length. Deterministic for a fixed
// dist.seed. Throws ExhaustedPrefixSpace when n unique prefixes cannot be
// produced.
FibTable synth_fib(u64 n, const LengthDistribution& dist);

}  // namespace lpm6
