#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lpm6 {

using u8 = uint8_t;
using u16 = uint16_t;
using u32 = uint32_t;
using u64 = uint64_t;
using u128 = unsigned __int128;

// Next-hop id reserved for "not resolved yet" while sweeping interval
// boundaries; user tables may not use it.
inline constexpr u32 kUnresolved = 0xFFFFFFFFu;

// Pads partially filled tree nodes; must compare greater than every real
// boundary key, so no boundary may ever equal it.
inline constexpr u64 kSentinelKey = ~u64(0);

// Largest key a search may carry. Queries are clamped here so sentinel
// slots never count as matches.
inline constexpr u64 kMaxQueryKey = kSentinelKey - 1;

enum class Errc {
  MalformedAddress,
  UnsupportedPrefixLength,
  MissingNextHop,
  ReservedNextHop,
  DuplicatePrefix,
  UnknownPrefix,
  SentinelCollision,
  ExhaustedPrefixSpace,
  InvalidArgument,
  BadTraceFile,
  BadSnapshotFile,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lpm6
