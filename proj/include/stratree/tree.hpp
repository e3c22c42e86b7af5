#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratree/population.hpp"

namespace stratree {

using Vertex = std::int64_t;

/// A balanced rooted tree in which every vertex at level l has c(l)
/// children. Level 0 is the root, level k-1 holds the leaves.
class SymmetricTreeSpec {
 public:
  /// The single-vertex tree (k = 1).
  SymmetricTreeSpec() = default;
  explicit SymmetricTreeSpec(std::vector<std::uint32_t> children);

  /// `pattern` cycled until the tree has `levels` levels.
  static SymmetricTreeSpec cycled(std::span<const std::uint32_t> pattern, int levels);

  int levels() const { return static_cast<int>(children_.size()) + 1; }
  std::span<const std::uint32_t> children() const { return children_; }

  /// c(l); zero on the leaf level.
  std::uint32_t children_at(int level) const;
  /// d(l) in the whole tree: c(l) plus one for the parent edge.
  std::uint32_t degree(int level) const;

  /// n(0..k-1), exact; throws ResourceLimit on 128-bit overflow.
  std::vector<Count> populations() const;
  Count vertex_count() const;

  /// Children sequence of the subtree rooted at `level`: c(level..k-2).
  SymmetricTreeSpec suffix(int level) const;

  std::string to_string() const;

  friend bool operator==(const SymmetricTreeSpec&, const SymmetricTreeSpec&) = default;

 private:
  std::vector<std::uint32_t> children_;
};

/// Two symmetric trees identified at their roots. Right-side levels are
/// reported as negative numbers.
struct GluedTreeSpec {
  SymmetricTreeSpec left;
  SymmetricTreeSpec right;

  Count vertex_count() const { return left.vertex_count() + right.vertex_count() - 1; }
};

/// Arbitrary rooted tree stored as a parent array, with a compressed
/// adjacency built once at construction.
class RootedTree {
 public:
  /// `parents[v]` is the parent of v, or -1 for the root. Throws InvalidSpec
  /// unless there is exactly one root and every vertex reaches it.
  explicit RootedTree(std::vector<Vertex> parents);

  Vertex vertex_count() const { return static_cast<Vertex>(parents_.size()); }
  Vertex root() const { return root_; }
  std::optional<Vertex> parent(Vertex v) const;
  std::span<const Vertex> neighbors(Vertex v) const;
  std::int64_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Vertex> parents() const { return parents_; }

 private:
  std::vector<Vertex> parents_;
  std::vector<std::int64_t> offsets_;
  std::vector<Vertex> adjacency_;
  Vertex root_ = 0;
};

/// Half-open run of consecutive vertex indices.
struct VertexRange {
  Vertex first = 0;
  Vertex count = 0;

  Vertex end() const { return first + count; }
  bool contains(Vertex v) const { return v >= first && v < end(); }
  Vertex operator[](Vertex i) const { return first + i; }
};

/// The maximal subtree T_v: one contiguous range per level below v.
struct Subtree {
  Vertex root = 0;
  int level = 0;
  std::vector<VertexRange> levels;  // levels[m] = descendants at depth m

  Vertex size() const;
  bool contains(Vertex u) const;
  std::vector<Vertex> vertices() const;
};

/// Breadth-first numbering of a symmetric tree. Root is 0, each level is a
/// contiguous block, and the children of a vertex form a contiguous run
/// ordered like their parents.
class TreeIndex {
 public:
  /// Throws ResourceLimit when |V| does not fit a signed 64-bit index.
  explicit TreeIndex(SymmetricTreeSpec spec);

  const SymmetricTreeSpec& spec() const { return spec_; }
  int levels() const { return spec_.levels(); }
  Vertex vertex_count() const { return offsets_.back(); }

  Vertex population(int level) const { return offsets_[level + 1] - offsets_[level]; }
  VertexRange level_range(int level) const { return {offsets_[level], population(level)}; }

  int level_of(Vertex v) const;
  Vertex position_in_level(Vertex v) const { return v - offsets_[level_of(v)]; }

  std::optional<Vertex> parent(Vertex v) const;
  VertexRange children(Vertex v) const;

  /// 1-based child labels along the root-to-v path; empty for the root.
  std::vector<std::uint32_t> identity(Vertex v) const;
  /// Inverse of identity(); throws InvalidSpec for labels outside the tree.
  Vertex index_of(std::span<const std::uint32_t> identity) const;

  Subtree subtree(Vertex v) const;

  /// Image of u under the isomorphism T_from -> T_to (from, to on one level).
  Vertex transport(Vertex u, Vertex from, Vertex to) const;

  RootedTree to_rooted_tree() const;

 private:
  void check(Vertex v) const;

  SymmetricTreeSpec spec_;
  std::vector<Vertex> offsets_;  // offsets_[l] = first vertex of level l
};

/// Explicit glued tree. Vertex 0 is the shared root, then the non-root
/// vertices of the left tree in breadth-first order, then the right tree's.
RootedTree realize_glued(const GluedTreeSpec& spec);

}  // namespace stratree
