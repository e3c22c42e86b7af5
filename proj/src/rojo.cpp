#include "stratree/rojo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stratree/laplacian.hpp"

namespace stratree {

Eigen::MatrixXd LevelRecurrence::to_dense() const {
  Eigen::MatrixXd out = diag.asDiagonal();
  for (Eigen::Index i = 0; i + 1 < size(); ++i) {
    out(i, i + 1) = upper[i];
    out(i + 1, i) = lower[i];
  }
  return out;
}

LevelRecurrence build_level_recurrence(const SymmetricTreeSpec& spec, int origin_level) {
  const int k = spec.levels();
  if (origin_level < 0 || origin_level >= k) throw InvalidSpec("origin level out of range");
  const int m = k - origin_level;
  LevelRecurrence s;
  s.origin_level = origin_level;
  s.diag.resize(m);
  s.upper.resize(m - 1);
  s.lower.resize(m - 1);
  for (int i = 0; i < m; ++i) {
    const int l = origin_level + i;
    s.diag[i] = spec.degree(l);
    if (i + 1 < m) {
      s.upper[i] = -static_cast<double>(spec.children_at(l));
      s.lower[i] = -1.0;
    }
  }
  return s;
}

TriDiag<double> balance(const LevelRecurrence& s) {
  Eigen::VectorXd off(s.size() - 1);
  for (Eigen::Index i = 0; i + 1 < s.size(); ++i) off[i] = std::sqrt(s.upper[i] * s.lower[i]);
  return TriDiag<double>(s.diag, off);
}

Eigen::VectorXd pull_back(const SymmetricTreeSpec& spec, int origin_level, const Eigen::VectorXd& u) {
  if (u.size() != spec.levels() - origin_level) throw InvalidSpec("pull_back dimension mismatch");
  Eigen::VectorXd g(u.size());
  double relative_population = 1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (i > 0) relative_population *= spec.children_at(origin_level + static_cast<int>(i) - 1);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    g[i] = sign * u[i] / std::sqrt(relative_population);
  }
  return g;
}

std::vector<SpectralLine> decompose_spectrum(const SymmetricTreeSpec& spec, int jobs) {
  const auto n = spec.populations();
  const int k = spec.levels();

  std::vector<std::vector<SpectralLine>> per_level(static_cast<std::size_t>(k));
  auto solve_level = [&](int l0) {
    const Count multiplicity = l0 == 0 ? Count{1} : n[l0] - n[l0 - 1];
    if (multiplicity == 0) return;
    const auto eig = tridiag_eigen(balance(build_level_recurrence(spec, l0)), false);
    auto& lines = per_level[static_cast<std::size_t>(l0)];
    for (Eigen::Index j = 0; j < eig.values.size(); ++j)
      lines.push_back({eig.values[j], multiplicity, l0, static_cast<int>(j)});
  };

  const int workers = std::clamp(jobs, 1, k);
  if (workers == 1) {
    for (int l0 = 0; l0 < k; ++l0) solve_level(l0);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int l0 = next++; l0 < k; l0 = next++) solve_level(l0);
      });
    }
  }

  std::vector<SpectralLine> lines;
  for (auto& level : per_level) lines.insert(lines.end(), level.begin(), level.end());
  std::stable_sort(lines.begin(), lines.end(), [](const SpectralLine& a, const SpectralLine& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.origin_level < b.origin_level;
  });
  return lines;
}

Count total_multiplicity(std::span<const SpectralLine> lines) {
  Count total = 0;
  for (const auto& line : lines) total = checked_add(total, line.multiplicity);
  return total;
}

std::vector<double> expand_spectrum(std::span<const SpectralLine> lines, std::size_t cap) {
  if (total_multiplicity(lines) > cap) throw ResourceLimit("spectrum expansion exceeds cap");
  std::vector<double> out;
  for (const auto& line : lines) out.insert(out.end(), static_cast<std::size_t>(line.multiplicity), line.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

CountingIdentity counting_identity(const SymmetricTreeSpec& spec) {
  const auto n = spec.populations();
  const int k = spec.levels();
  CountingIdentity out;
  for (int i = 1; i < k; ++i)
    out.lhs = checked_add(out.lhs, checked_mul(static_cast<Count>(k - i), n[i] - n[i - 1]));
  out.lhs = checked_add(out.lhs, static_cast<Count>(k));
  out.vertex_count = spec.vertex_count();
  return out;
}

StratifiedVector::StratifiedVector(Eigen::VectorXd values, int origin_level)
    : values_(std::move(values)), origin_level_(origin_level) {
  if (values_.size() == 0) throw InvalidSpec("stratified vector needs at least one level");
  if (values_[0] == 0.0) throw InvalidSpec("stratified vector vanishes on its subtree root");
}

Eigen::VectorXd stratified_lift(const TreeIndex& index, Vertex v, const StratifiedVector& g) {
  const Subtree t = index.subtree(v);
  if (g.origin_level() != t.level || g.values().size() != static_cast<Eigen::Index>(t.levels.size()))
    throw InvalidSpec("stratified vector does not match the subtree levels");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(index.vertex_count());
  for (std::size_t m = 0; m < t.levels.size(); ++m)
    out.segment(t.levels[m].first, t.levels[m].count).setConstant(g.values()[static_cast<Eigen::Index>(m)]);
  return out;
}

std::vector<Eigen::VectorXd> antisym_lift(const TreeIndex& index, Vertex v, const Eigen::VectorXd& f) {
  if (f.size() != index.vertex_count()) throw InvalidSpec("vector length does not match the tree");
  const auto parent = index.parent(v);
  if (!parent) throw InvalidSpec("antisymmetric lift needs a non-root vertex");
  if (f[v] == 0.0) throw InvalidSpec("antisymmetric lift needs f(v) != 0");

  const Subtree tv = index.subtree(v);
  Eigen::VectorXd outside = f;
  for (const auto& r : tv.levels) outside.segment(r.first, r.count).setZero();
  if (!outside.isZero(0.0)) throw InvalidSpec("f is not supported on the subtree of v");

  const VertexRange siblings = index.children(*parent);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(siblings.count - 1));
  for (Vertex i = 0; i < siblings.count; ++i) {
    const Vertex s = siblings[i];
    if (s == v) continue;
    const Subtree ts = index.subtree(s);
    Eigen::VectorXd lifted = f;
    for (std::size_t m = 0; m < tv.levels.size(); ++m)
      lifted.segment(ts.levels[m].first, ts.levels[m].count) = -f.segment(tv.levels[m].first, tv.levels[m].count);
    out.push_back(std::move(lifted));
  }
  return out;
}

Eigen::VectorXd symmetrize(const TreeIndex& index, Vertex v, const Eigen::VectorXd& f) {
  if (f.size() != index.vertex_count()) throw InvalidSpec("vector length does not match the tree");
  Eigen::VectorXd out = f;
  const Vertex c = index.children(v).count;
  if (c <= 1) return out;
  const Subtree t = index.subtree(v);
  for (std::size_t m = 1; m < t.levels.size(); ++m) {
    const VertexRange r = t.levels[m];
    const Vertex block = r.count / c;
    for (Vertex i = 0; i < block; ++i) {
      // Offsets from the first copy keep an already-symmetric f bit-identical.
      const double base = f[r.first + i];
      double spread = 0;
      for (Vertex j = 0; j < c; ++j) spread += f[r.first + j * block + i] - base;
      const double mean = base + spread / static_cast<double>(c);
      for (Vertex j = 0; j < c; ++j) out[r.first + j * block + i] = mean;
    }
  }
  return out;
}

std::string_view to_string(Construction c) {
  return c == Construction::stratified ? "stratified" : "antisym";
}

double EigenBasis::max_residual() const {
  double worst = 0;
  for (const auto& p : pairs) worst = std::max(worst, p.residual);
  return worst;
}

Eigen::VectorXd EigenBasis::values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) out[static_cast<Eigen::Index>(i)] = pairs[i].lambda;
  return out;
}

Eigen::MatrixXd EigenBasis::vectors() const {
  Eigen::MatrixXd out(vertex_count, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pairs[i].vector;
  return out;
}

namespace detail {

StratifiedFamily stratified_family(const SymmetricTreeSpec& spec, int origin_level) {
  const auto eig = tridiag_eigen(balance(build_level_recurrence(spec, origin_level)), true);
  StratifiedFamily family;
  family.values = eig.values;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    Eigen::VectorXd g = pull_back(spec, origin_level, eig.vectors.col(j));
    if (g[0] < 0) g = -g;
    family.vectors.emplace_back(std::move(g), origin_level);
  }
  return family;
}

std::vector<EigenPair> antisym_pairs(const TreeIndex& index, int origin_level) {
  std::vector<EigenPair> out;
  if (index.spec().children_at(origin_level - 1) < 2) return out;
  const auto family = stratified_family(index.spec(), origin_level);
  const VertexRange parents = index.level_range(origin_level - 1);
  for (Vertex p = 0; p < parents.count; ++p) {
    const Vertex v = index.children(parents[p]).first;
    for (std::size_t j = 0; j < family.vectors.size(); ++j) {
      const Eigen::VectorXd f = stratified_lift(index, v, family.vectors[j]);
      for (auto& lifted : antisym_lift(index, v, f))
        out.push_back({family.values[static_cast<Eigen::Index>(j)], std::move(lifted), origin_level,
                       Construction::antisym, 0.0});
    }
  }
  return out;
}

}  // namespace detail

EigenBasis full_eigenbasis(const SymmetricTreeSpec& spec, Vertex cap) {
  if (spec.vertex_count() > static_cast<Count>(cap))
    throw ResourceLimit("eigenbasis refused: " + to_string(spec.vertex_count()) + " vertices exceed cap " +
                        std::to_string(cap));
  const TreeIndex index(spec);
  const auto laplacian = assemble(index);

  EigenBasis basis;
  basis.vertex_count = index.vertex_count();
  basis.pairs.reserve(static_cast<std::size_t>(index.vertex_count()));

  const auto whole = detail::stratified_family(spec, 0);
  for (std::size_t j = 0; j < whole.vectors.size(); ++j)
    basis.pairs.push_back({whole.values[static_cast<Eigen::Index>(j)], stratified_lift(index, 0, whole.vectors[j]), 0,
                           Construction::stratified, 0.0});
  for (int l0 = 1; l0 < index.levels(); ++l0) {
    auto family = detail::antisym_pairs(index, l0);
    std::move(family.begin(), family.end(), std::back_inserter(basis.pairs));
  }

  for (auto& pair : basis.pairs) {
    pair.vector /= pair.vector.lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd r = matvec(laplacian, pair.vector) - pair.lambda * pair.vector;
    pair.residual = r.lpNorm<Eigen::Infinity>();
  }
  std::stable_sort(basis.pairs.begin(), basis.pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.origin_level < b.origin_level;
  });
  return basis;
}

Eigen::Index gram_schmidt_rank(const Eigen::MatrixXd& columns, double pivot) {
  Eigen::MatrixXd q(columns.rows(), columns.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    const double norm = columns.col(j).norm();
    if (norm == 0.0) continue;
    Eigen::VectorXd x = columns.col(j) / norm;
    for (Eigen::Index i = 0; i < rank; ++i) x -= q.col(i).dot(x) * q.col(i);
    const double remaining = x.norm();
    if (remaining < pivot) continue;
    q.col(rank++) = x / remaining;
  }
  return rank;
}

}  // namespace stratree
