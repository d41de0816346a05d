#pragma once

#include <istream>
#include <new>
#include <ostream>
#include <string>
#include <vector>

#include "lpm6/intervals.hpp"
#include "lpm6/types.hpp"

namespace lpm6 {

// Shape of a linearized tree: one dense key array holding the internal
// levels in left-to-right breadth-first order followed by the leaves.
// Nodes hold k keys and address b = k + 1 children, all located by index
// arithmetic; there are no stored child references.
struct TreeGeometry {
  int k = 8;   // keys per node
  int b = 9;   // arity, always k + 1
  int depth = 0;  // internal levels; a lookup visits depth + 1 nodes
  u64 num_keys = 0;              // real boundary count m
  u64 allocated_leaf_nodes = 0;  // ceil(m / k); trailing all-sentinel leaves are trimmed
  u64 leaf_start = 0;            // first leaf key index == level_start[depth]
  std::vector<u64> level_start;  // size depth + 1

  u64 leaf_capacity_nodes() const;  // b^depth
  u64 capacity_keys() const { return leaf_capacity_nodes() * k; }
  u64 internal_nodes() const { return (leaf_capacity_nodes() - 1) / (b - 1); }
  u64 total_key_slots() const { return leaf_start + allocated_leaf_nodes * k; }

  friend bool operator==(const TreeGeometry&, const TreeGeometry&) = default;
};

// Minimal depth whose leaf capacity covers `num_keys` boundaries.
TreeGeometry plan_geometry(u64 num_keys, int k);

// Key index of child `child`'s first slot under node `node` of `level`.
// child_key_start(g, d, j, c) = level_start[d+1] + (j*b + c)*k.
u64 child_key_start(const TreeGeometry& g, int level, u64 node, int child);

template <class T, std::size_t Align>
struct AlignedAlloc {
  using value_type = T;
  AlignedAlloc() = default;
  template <class U>
  AlignedAlloc(const AlignedAlloc<U, Align>&) {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(Align)));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, std::align_val_t(Align));
  }
  template <class U>
  bool operator==(const AlignedAlloc<U, Align>&) const { return true; }
};

// Nodes are 64-byte cache lines; the array is allocated on that boundary.
using KeyArray = std::vector<u64, AlignedAlloc<u64, 64>>;

struct LinearizedTree {
  KeyArray keys;           // leaf_start internal slots, then allocated leaves
  std::vector<u32> values; // next hop per leaf key slot, padding replicates the last real value
  TreeGeometry geom;
  u32 default_next_hop = 0;

  const u64* leaf_keys() const { return keys.data() + geom.leaf_start; }
};

// Leaf level = boundaries then sentinels; internal separators are pulled
// from the sorted boundary array, with out-of-range reads defined as the
// sentinel. All internal levels are fully allocated; only trailing
// all-sentinel leaf nodes are trimmed.
LinearizedTree build_tree(const IntervalMap& map, int k = 8);

struct MemoryFootprint {
  u64 leaf_bytes = 0;
  u64 internal_bytes = 0;
  u64 value_bytes = 0;
  u64 total_bytes = 0;
  double bytes_per_interval = 0.0;
  // Same structure accounted with 8-byte value slots, for comparing
  // against key+value packings.
  u64 total_bytes_value8 = 0;
  double bytes_per_interval_value8 = 0.0;
};

MemoryFootprint memory_footprint(const LinearizedTree& t);

// Binary snapshot: "PBT1", u16 version, u16 k, u16 depth, u64 m,
// u64 allocated_leaf_nodes, then keys as little-endian u64 and values as
// little-endian u32. Byte-identical for identical trees.
void save_snapshot(const LinearizedTree& t, std::ostream& out);
void save_snapshot_file(const LinearizedTree& t, const std::string& path);
LinearizedTree load_snapshot(std::istream& in);
LinearizedTree load_snapshot_file(const std::string& path);

}  // namespace lpm6
