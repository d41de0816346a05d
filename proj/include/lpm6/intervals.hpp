#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "lpm6/fib.hpp"
#include "lpm6/types.hpp"

namespace lpm6 {

// The canonical 1D form of a FIB: the address space cut at every rule
// range endpoint. boundaries[i] starts the i-th elementary interval and
// next_hops[i] is the best-match route everywhere inside it.
//
// Invariants: boundaries[0] == 0, strictly increasing, no boundary equals
// the sentinel key, and size <= 2N + 1 for N input rules.
struct IntervalMap {
  std::vector<u64> boundaries;
  std::vector<u32> next_hops;
  u32 default_next_hop = 0;

  size_t size() const { return boundaries.size(); }
};

struct IntervalBuildOptions {
  // Merge adjacent intervals that resolve to the same next hop.
  bool merge_adjacent = true;
};

// Range conversion + endpoint sweep. Throws SentinelCollision when a rule
// would place a boundary at the sentinel key, and ReservedNextHop when a
// rule uses the internal unresolved id.
IntervalMap build_intervals(const FibTable& fib, const IntervalBuildOptions& opt = {});

// Brute force over every rule; the reference answer for everything else.
u32 lookup_linear_oracle(const FibTable& fib, u128 addr);

// Same linear scan over all rules, evaluated for a batch of top-64-bit
// keys (i.e. addresses with zero low bits) and optionally split across
// threads. Exists so large-scale equivalence checks stay affordable;
// agrees with lookup_linear_oracle by construction and by test.
std::vector<u32> linear_oracle_keys(const FibTable& fib, std::span<const u64> keys,
                                    int threads = 1);

// Predecessor search on the sorted boundaries (plain binary search).
u32 lookup_interval_oracle(const IntervalMap& map, u64 key);

// CSV dump: "start_key_hex,next_hop" per interval.
void write_intervals_csv(const IntervalMap& map, std::ostream& out);

}  // namespace lpm6
