#include "lpm6/intervals.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <thread>

#include "kernels.hpp"

namespace lpm6 {

namespace {

struct BoundaryEvent {
  u128 address;  // 0 .. 2^64 inclusive, hence 65-bit capable
  bool is_end;
  int length;
  u32 next_hop;  // kUnresolved for End events until the sweep resolves them
};

// At one address, Ends come before Starts; Starts by ascending length so
// the most specific rule lands on top of the stack; Ends by descending
// length so nested ranges close innermost-first.
bool event_before(const BoundaryEvent& a, const BoundaryEvent& b) {
  if (a.address != b.address) return a.address < b.address;
  if (a.is_end != b.is_end) return a.is_end;
  if (a.is_end) return a.length > b.length;
  return a.length < b.length;
}

}  // namespace

IntervalMap build_intervals(const FibTable& fib, const IntervalBuildOptions& opt) {
  std::vector<BoundaryEvent> events;
  events.reserve(fib.size() * 2);
  for (const Prefix& p : fib.entries()) {
    if (p.next_hop == kUnresolved)
      throw Error(Errc::ReservedNextHop, "rule uses the reserved next hop: " + format_prefix(p));
    const KeyRange r = prefix_to_range(p);
    events.push_back({u128(r.start_key), false, p.length, p.next_hop});
    events.push_back({r.end_exclusive, true, p.length, kUnresolved});
  }
  std::sort(events.begin(), events.end(), event_before);

  IntervalMap map;
  map.default_next_hop = fib.default_next_hop();
  map.boundaries.reserve(fib.size() * 2 + 1);
  map.next_hops.reserve(fib.size() * 2 + 1);

  // The whole key space starts out on the default route.
  if (events.empty() || events.front().address != 0) {
    map.boundaries.push_back(0);
    map.next_hops.push_back(map.default_next_hop);
  }

  constexpr u128 kTop = u128(1) << 64;
  std::vector<std::pair<int, u32>> stack;  // (length, next_hop)
  size_t i = 0;
  while (i < events.size()) {
    const u128 addr = events[i].address;
    for (; i < events.size() && events[i].address == addr; ++i) {
      const BoundaryEvent& e = events[i];
      if (e.is_end) {
        assert(!stack.empty() && stack.back().first == e.length);
        stack.pop_back();
      } else {
        stack.emplace_back(e.length, e.next_hop);
      }
    }
    if (addr == kTop) continue;  // nothing starts at or beyond the top of the key space
    map.boundaries.push_back(static_cast<u64>(addr));
    map.next_hops.push_back(stack.empty() ? map.default_next_hop : stack.back().second);
  }
  assert(stack.empty());

  for (u64 b : map.boundaries)
    if (b == kSentinelKey)
      throw Error(Errc::SentinelCollision,
                  "rule set produces a boundary at the sentinel key ffff:ffff:ffff:ffff::");

  if (opt.merge_adjacent) {
    size_t w = 1;
    for (size_t r = 1; r < map.boundaries.size(); ++r) {
      if (map.next_hops[r] == map.next_hops[w - 1]) continue;
      map.boundaries[w] = map.boundaries[r];
      map.next_hops[w] = map.next_hops[r];
      ++w;
    }
    map.boundaries.resize(w);
    map.next_hops.resize(w);
  }
  return map;
}

u32 lookup_linear_oracle(const FibTable& fib, u128 addr) {
  int best_len = -1;
  u32 best_hop = fib.default_next_hop();
  for (const Prefix& p : fib.entries()) {
    if (p.length <= best_len) continue;
    const u128 mask = p.length == 0 ? u128(0) : ~u128(0) << (128 - p.length);
    if ((addr & mask) == p.value) {
      best_len = p.length;
      best_hop = p.next_hop;
    }
  }
  return best_hop;
}

std::vector<u32> linear_oracle_keys(const FibTable& fib, std::span<const u64> keys, int threads) {
  detail::RuleScan rules;
  rules.start.reserve(fib.size());
  rules.mask.reserve(fib.size());
  rules.rank.reserve(fib.size());
  for (const Prefix& p : fib.entries()) {
    rules.start.push_back(p.top64());
    rules.mask.push_back(p.length == 0 ? 0 : ~u64(0) << (64 - p.length));
    rules.rank.push_back((u64(p.length + 1) << 32) | p.next_hop);
  }

  std::vector<u64> best(keys.size(), 0);
  const detail::OracleScanFn scan = detail::vector_backend().oracle_scan;
  if (threads <= 1 || keys.size() < 1024) {
    scan(rules, keys.data(), keys.size(), best.data());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (keys.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const size_t lo = std::min(keys.size(), t * chunk);
      const size_t hi = std::min(keys.size(), lo + chunk);
      if (lo == hi) break;
      pool.emplace_back([&, lo, hi] { scan(rules, keys.data() + lo, hi - lo, best.data() + lo); });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<u32> out(keys.size());
  for (size_t i = 0; i < keys.size(); ++i)
    out[i] = best[i] ? static_cast<u32>(best[i]) : fib.default_next_hop();
  return out;
}

u32 lookup_interval_oracle(const IntervalMap& map, u64 key) {
  const auto it = std::upper_bound(map.boundaries.begin(), map.boundaries.end(), key);
  return map.next_hops[(it - map.boundaries.begin()) - 1];
}

void write_intervals_csv(const IntervalMap& map, std::ostream& out) {
  out << "start_key_hex,next_hop\n";
  char buf[17];
  for (size_t i = 0; i < map.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(map.boundaries[i]));
    out << buf << ',' << map.next_hops[i] << '\n';
  }
}

}  // namespace lpm6
