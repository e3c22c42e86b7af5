#include "stratree/tree.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace stratree {

SymmetricTreeSpec::SymmetricTreeSpec(std::vector<std::uint32_t> children)
    : children_(std::move(children)) {
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (children_[i] == 0)
      throw InvalidSpec("children count at level " + std::to_string(i) + " must be positive");
  }
}

SymmetricTreeSpec SymmetricTreeSpec::cycled(std::span<const std::uint32_t> pattern, int levels) {
  if (levels < 1) throw InvalidSpec("a tree has at least one level");
  if (pattern.empty() && levels > 1) throw InvalidSpec("cannot repeat an empty children pattern");
  std::vector<std::uint32_t> children;
  children.reserve(static_cast<std::size_t>(levels - 1));
  for (int i = 0; i + 1 < levels; ++i) children.push_back(pattern[static_cast<std::size_t>(i) % pattern.size()]);
  return SymmetricTreeSpec(std::move(children));
}

std::uint32_t SymmetricTreeSpec::children_at(int level) const {
  if (level < 0 || level >= levels()) throw InvalidSpec("level out of range");
  return level + 1 < levels() ? children_[static_cast<std::size_t>(level)] : 0U;
}

std::uint32_t SymmetricTreeSpec::degree(int level) const {
  return children_at(level) + (level > 0 ? 1U : 0U);
}

std::vector<Count> SymmetricTreeSpec::populations() const {
  std::vector<Count> n{1};
  n.reserve(children_.size() + 1);
  for (auto c : children_) n.push_back(checked_mul(n.back(), c));
  return n;
}

Count SymmetricTreeSpec::vertex_count() const {
  Count total = 0;
  for (Count n : populations()) total = checked_add(total, n);
  return total;
}

SymmetricTreeSpec SymmetricTreeSpec::suffix(int level) const {
  if (level < 0 || level >= levels()) throw InvalidSpec("level out of range");
  return SymmetricTreeSpec(std::vector<std::uint32_t>(children_.begin() + level, children_.end()));
}

std::string SymmetricTreeSpec::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(children_[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------

RootedTree::RootedTree(std::vector<Vertex> parents) : parents_(std::move(parents)) {
  const Vertex n = vertex_count();
  if (n == 0) throw InvalidSpec("tree has no vertices");
  Vertex roots = 0;
  std::vector<std::int64_t> degree(static_cast<std::size_t>(n), 0);
  for (Vertex v = 0; v < n; ++v) {
    Vertex p = parents_[v];
    if (p == -1) {
      ++roots;
      root_ = v;
      continue;
    }
    if (p < 0 || p >= n || p == v) throw InvalidSpec("parent index out of range");
    ++degree[v];
    ++degree[p];
  }
  if (roots != 1) throw InvalidSpec("tree must have exactly one root");

  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Vertex v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(static_cast<std::size_t>(offsets_.back()));
  std::vector<std::int64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (Vertex v = 0; v < n; ++v) {
    Vertex p = parents_[v];
    if (p == -1) continue;
    adjacency_[fill[v]++] = p;
    adjacency_[fill[p]++] = v;
  }

  // n-1 edges plus reachability from the root rules out cycles.
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Vertex> stack{root_};
  seen[root_] = true;
  Vertex reached = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : neighbors(v)) {
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  if (reached != n) throw InvalidSpec("parent array does not describe a connected tree");
}

std::optional<Vertex> RootedTree::parent(Vertex v) const {
  if (parents_[v] < 0) return std::nullopt;
  return parents_[v];
}

std::span<const Vertex> RootedTree::neighbors(Vertex v) const {
  return std::span<const Vertex>(adjacency_).subspan(static_cast<std::size_t>(offsets_[v]),
                                                     static_cast<std::size_t>(degree(v)));
}

// ---------------------------------------------------------------------------

Vertex Subtree::size() const {
  Vertex total = 0;
  for (const auto& r : levels) total += r.count;
  return total;
}

bool Subtree::contains(Vertex u) const {
  return std::any_of(levels.begin(), levels.end(), [u](const VertexRange& r) { return r.contains(u); });
}

std::vector<Vertex> Subtree::vertices() const {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (const auto& r : levels)
    for (Vertex i = 0; i < r.count; ++i) out.push_back(r[i]);
  return out;
}

TreeIndex::TreeIndex(SymmetricTreeSpec spec) : spec_(std::move(spec)) {
  constexpr Count kMax = static_cast<Count>(std::numeric_limits<Vertex>::max());
  const auto n = spec_.populations();
  offsets_.reserve(n.size() + 1);
  offsets_.push_back(0);
  Count total = 0;
  for (Count p : n) {
    total = checked_add(total, p);
    if (total > kMax) throw ResourceLimit("tree has more than 2^63-1 vertices");
    offsets_.push_back(static_cast<Vertex>(total));
  }
}

void TreeIndex::check(Vertex v) const {
  if (v < 0 || v >= vertex_count()) throw InvalidSpec("vertex index out of range");
}

int TreeIndex::level_of(Vertex v) const {
  check(v);
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), v);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

std::optional<Vertex> TreeIndex::parent(Vertex v) const {
  int l = level_of(v);
  if (l == 0) return std::nullopt;
  Vertex pos = v - offsets_[l];
  return offsets_[l - 1] + pos / spec_.children_at(l - 1);
}

VertexRange TreeIndex::children(Vertex v) const {
  int l = level_of(v);
  Vertex c = spec_.children_at(l);
  if (c == 0) return {};
  return {offsets_[l + 1] + (v - offsets_[l]) * c, c};
}

std::vector<std::uint32_t> TreeIndex::identity(Vertex v) const {
  int l = level_of(v);
  std::vector<std::uint32_t> id(static_cast<std::size_t>(l));
  Vertex pos = v - offsets_[l];
  for (int i = l; i > 0; --i) {
    Vertex c = spec_.children_at(i - 1);
    id[static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(pos % c) + 1;
    pos /= c;
  }
  return id;
}

Vertex TreeIndex::index_of(std::span<const std::uint32_t> identity) const {
  if (static_cast<int>(identity.size()) >= levels()) throw InvalidSpec("identity longer than tree depth");
  Vertex pos = 0;
  for (std::size_t i = 0; i < identity.size(); ++i) {
    std::uint32_t c = spec_.children_at(static_cast<int>(i));
    if (identity[i] < 1 || identity[i] > c) throw InvalidSpec("identity label out of range");
    pos = pos * c + (identity[i] - 1);
  }
  return offsets_[identity.size()] + pos;
}

Subtree TreeIndex::subtree(Vertex v) const {
  Subtree t;
  t.root = v;
  t.level = level_of(v);
  VertexRange r{v, 1};
  for (int l = t.level; l < levels(); ++l) {
    t.levels.push_back(r);
    if (l + 1 < levels()) {
      Vertex c = spec_.children_at(l);
      r = {offsets_[l + 1] + (r.first - offsets_[l]) * c, r.count * c};
    }
  }
  return t;
}

Vertex TreeIndex::transport(Vertex u, Vertex from, Vertex to) const {
  int lf = level_of(from);
  if (level_of(to) != lf) throw InvalidSpec("transport endpoints must share a level");
  int lu = level_of(u);
  if (lu < lf) throw InvalidSpec("transported vertex lies above the subtree root");
  Vertex scale = population(lu) / population(lf);
  Vertex pu = u - offsets_[lu];
  Vertex pf = from - offsets_[lf];
  Vertex offset = pu - pf * scale;
  if (offset < 0 || offset >= scale) throw InvalidSpec("transported vertex is not in the source subtree");
  return offsets_[lu] + (to - offsets_[lf]) * scale + offset;
}

RootedTree TreeIndex::to_rooted_tree() const {
  std::vector<Vertex> parents(static_cast<std::size_t>(vertex_count()), -1);
  for (int l = 1; l < levels(); ++l) {
    Vertex c = spec_.children_at(l - 1);
    for (Vertex i = 0; i < population(l); ++i) parents[offsets_[l] + i] = offsets_[l - 1] + i / c;
  }
  return RootedTree(std::move(parents));
}

RootedTree realize_glued(const GluedTreeSpec& spec) {
  TreeIndex left(spec.left);
  TreeIndex right(spec.right);
  const Vertex shift = left.vertex_count() - 1;
  std::vector<Vertex> parents{-1};
  parents.reserve(static_cast<std::size_t>(left.vertex_count() + right.vertex_count() - 1));
  for (Vertex v = 1; v < left.vertex_count(); ++v) parents.push_back(*left.parent(v));
  for (Vertex v = 1; v < right.vertex_count(); ++v) {
    Vertex p = *right.parent(v);
    parents.push_back(p == 0 ? 0 : p + shift);
  }
  return RootedTree(std::move(parents));
}

}  // namespace stratree
