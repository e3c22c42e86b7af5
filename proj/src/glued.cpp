#include "stratree/glued.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "stratree/laplacian.hpp"

namespace stratree {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::stratified: break;
  }
  return "stratified";
}

namespace {

// Population of the row's level relative to the root, on its own side.
std::vector<double> relative_populations(const GluedTreeSpec& spec) {
  const int kl = spec.left.levels(), kr = spec.right.levels();
  std::vector<double> rel(static_cast<std::size_t>(kl + kr - 1));
  const int root = kr - 1;
  rel[root] = 1.0;
  for (int m = 1; m < kr; ++m) rel[root - m] = rel[root - m + 1] * spec.right.children_at(m - 1);
  for (int m = 1; m < kl; ++m) rel[root + m] = rel[root + m - 1] * spec.left.children_at(m - 1);
  return rel;
}

}  // namespace

LevelRecurrence glued_level_recurrence(const GluedTreeSpec& spec) {
  const auto& left = spec.left;
  const auto& right = spec.right;
  const int kl = left.levels(), kr = right.levels();
  const int m = kl + kr - 1;
  const int root = kr - 1;

  LevelRecurrence s;
  s.diag.resize(m);
  s.upper.resize(m - 1);
  s.lower.resize(m - 1);
  for (int i = 0; i < m; ++i) {
    if (i < root) s.diag[i] = right.degree(root - i);
    else if (i == root) s.diag[i] = left.children_at(0) + right.children_at(0);
    else s.diag[i] = left.degree(i - root);
  }
  for (int i = 0; i + 1 < m; ++i) {
    if (i < root) {
      // Row i: right level root-i; row i+1 sits one level closer to the root.
      s.upper[i] = -1.0;
      s.lower[i] = -static_cast<double>(right.children_at(root - i - 1));
    } else {
      s.upper[i] = -static_cast<double>(left.children_at(i - root));
      s.lower[i] = -1.0;
    }
  }
  return s;
}

TriDiag<double> glued_stratified_matrix(const GluedTreeSpec& spec) {
  return balance(glued_level_recurrence(spec));
}

std::vector<GluedSpectralLine> glued_spectrum(const GluedTreeSpec& spec, int jobs) {
  std::vector<GluedSpectralLine> lines;
  auto add_side = [&](const SymmetricTreeSpec& side_spec, Side side) {
    for (const auto& line : decompose_spectrum(side_spec, jobs))
      if (line.origin_level >= 1)
        lines.push_back({line.lambda, line.multiplicity, side, line.origin_level, line.position});
  };
  add_side(spec.left, Side::left);
  add_side(spec.right, Side::right);

  const auto eig = tridiag_eigen(glued_stratified_matrix(spec), false);
  for (Eigen::Index j = 0; j < eig.values.size(); ++j)
    lines.push_back({eig.values[j], 1, Side::stratified, 0, static_cast<int>(j)});

  std::stable_sort(lines.begin(), lines.end(), [](const GluedSpectralLine& a, const GluedSpectralLine& b) {
    return std::tie(a.lambda, a.side, a.origin_level) < std::tie(b.lambda, b.side, b.origin_level);
  });
  return lines;
}

Count total_multiplicity(std::span<const GluedSpectralLine> lines) {
  Count total = 0;
  for (const auto& line : lines) total = checked_add(total, line.multiplicity);
  return total;
}

std::vector<double> expand_spectrum(std::span<const GluedSpectralLine> lines, std::size_t cap) {
  if (total_multiplicity(lines) > cap) throw ResourceLimit("spectrum expansion exceeds cap");
  std::vector<double> out;
  for (const auto& line : lines) out.insert(out.end(), static_cast<std::size_t>(line.multiplicity), line.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> glued_signed_levels(const GluedTreeSpec& spec) {
  const TreeIndex left(spec.left), right(spec.right);
  std::vector<int> levels{0};
  for (Vertex v = 1; v < left.vertex_count(); ++v) levels.push_back(left.level_of(v));
  for (Vertex v = 1; v < right.vertex_count(); ++v) levels.push_back(-right.level_of(v));
  return levels;
}

double GluedEigenBasis::max_residual() const {
  double worst = 0;
  for (const auto& p : pairs) worst = std::max(worst, p.pair.residual);
  return worst;
}

Eigen::VectorXd GluedEigenBasis::values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) out[static_cast<Eigen::Index>(i)] = pairs[i].pair.lambda;
  return out;
}

Eigen::MatrixXd GluedEigenBasis::vectors() const {
  Eigen::MatrixXd out(vertex_count, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pairs[i].pair.vector;
  return out;
}

GluedEigenBasis glued_eigenbasis(const GluedTreeSpec& spec, Vertex cap) {
  if (spec.vertex_count() > static_cast<Count>(cap))
    throw ResourceLimit("eigenbasis refused: " + to_string(spec.vertex_count()) + " vertices exceed cap " +
                        std::to_string(cap));
  const TreeIndex left(spec.left), right(spec.right);
  const RootedTree tree = realize_glued(spec);
  const auto laplacian = assemble(tree);
  const Vertex n = tree.vertex_count();
  const Vertex shift = left.vertex_count() - 1;

  GluedEigenBasis basis;
  basis.vertex_count = n;

  // Stratified eigenfunctions over signed levels.
  const int kl = left.levels(), kr = right.levels();
  const int root = kr - 1;
  const auto rel = relative_populations(spec);
  const auto eig = tridiag_eigen(glued_stratified_matrix(spec), true);
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    Eigen::VectorXd g(eig.vectors.rows());
    for (Eigen::Index i = 0; i < g.size(); ++i)
      g[i] = ((i % 2 == 0) ? 1.0 : -1.0) * eig.vectors(i, j) / std::sqrt(rel[static_cast<std::size_t>(i)]);
    Eigen::VectorXd f(n);
    f[0] = g[root];
    for (int m = 1; m < kl; ++m) {
      const VertexRange r = left.level_range(m);
      f.segment(r.first, r.count).setConstant(g[root + m]);
    }
    for (int m = 1; m < kr; ++m) {
      const VertexRange r = right.level_range(m);
      f.segment(r.first + shift, r.count).setConstant(g[root - m]);
    }
    basis.pairs.push_back({{eig.values[j], std::move(f), 0, Construction::stratified, 0.0}, Side::stratified});
  }

  // Root-vanishing families of each side, embedded in the glued layout.
  auto embed = [&](const TreeIndex& index, Side side, Vertex offset) {
    for (int l0 = 1; l0 < index.levels(); ++l0) {
      for (auto& pair : detail::antisym_pairs(index, l0)) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        f.segment(1 + offset, index.vertex_count() - 1) = pair.vector.tail(index.vertex_count() - 1);
        pair.vector = std::move(f);
        basis.pairs.push_back({std::move(pair), side});
      }
    }
  };
  embed(left, Side::left, 0);
  embed(right, Side::right, shift);

  for (auto& entry : basis.pairs) {
    auto& pair = entry.pair;
    pair.vector /= pair.vector.lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd r = matvec(laplacian, pair.vector) - pair.lambda * pair.vector;
    pair.residual = r.lpNorm<Eigen::Infinity>();
  }
  std::stable_sort(basis.pairs.begin(), basis.pairs.end(), [](const GluedEigenPair& a, const GluedEigenPair& b) {
    return std::tie(a.pair.lambda, a.side, a.pair.origin_level) < std::tie(b.pair.lambda, b.side, b.pair.origin_level);
  });
  return basis;
}

}  // namespace stratree
