#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "stratree/tree.hpp"

namespace stratree {

/// Symmetric matrix in compressed-row layout (outer index = row offsets).
template <typename Scalar = double>
using SparseSymMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, std::int64_t>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

// Principal submatrix of the tree Laplacian on `omega` (sorted, unique).
// Diagonals keep the full-tree degree; only edges inside omega survive.
template <typename Scalar>
SparseSymMatrix<Scalar> laplacian_block(const RootedTree& tree, std::span<const Vertex> omega) {
  const Vertex n = tree.vertex_count();
  std::vector<Vertex> local(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < omega.size(); ++i) local[omega[i]] = static_cast<Vertex>(i);

  std::vector<Eigen::Triplet<Scalar, std::int64_t>> entries;
  entries.reserve(omega.size() * 3);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const Vertex v = omega[i];
    const std::int64_t degree = tree.degree(v);  // exact integer
    entries.emplace_back(static_cast<std::int64_t>(i), static_cast<std::int64_t>(i), static_cast<Scalar>(degree));
    for (Vertex u : tree.neighbors(v)) {
      if (local[u] >= 0) entries.emplace_back(static_cast<std::int64_t>(i), local[u], Scalar(-1));
    }
  }
  const auto dim = static_cast<std::int64_t>(omega.size());
  SparseSymMatrix<Scalar> m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

}  // namespace detail

/// Graph Laplacian: degree on the diagonal, -1 on every tree edge.
template <typename Scalar = double>
SparseSymMatrix<Scalar> assemble(const RootedTree& tree) {
  std::vector<Vertex> all(static_cast<std::size_t>(tree.vertex_count()));
  for (Vertex v = 0; v < tree.vertex_count(); ++v) all[v] = v;
  return detail::laplacian_block<Scalar>(tree, all);
}

template <typename Scalar = double>
SparseSymMatrix<Scalar> assemble(const TreeIndex& index) {
  return assemble<Scalar>(index.to_rooted_tree());
}

/// Dirichlet Laplacian on `omega`: the Laplacian applied to functions that
/// vanish outside omega, restricted back to omega. `omega` need not be
/// sorted; it must be nonempty and free of duplicates.
template <typename Scalar = double>
SparseSymMatrix<Scalar> assemble_dirichlet(const RootedTree& tree, std::span<const Vertex> omega) {
  if (omega.empty()) throw InvalidSpec("Dirichlet vertex set must be nonempty");
  std::vector<Vertex> sorted(omega.begin(), omega.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidSpec("Dirichlet vertex set contains duplicates");
  if (sorted.front() < 0 || sorted.back() >= tree.vertex_count())
    throw InvalidSpec("Dirichlet vertex out of range");
  return detail::laplacian_block<Scalar>(tree, sorted);
}

template <typename Scalar = double>
SparseSymMatrix<Scalar> assemble_dirichlet(const TreeIndex& index, std::span<const Vertex> omega) {
  return assemble_dirichlet<Scalar>(index.to_rooted_tree(), omega);
}

template <typename Scalar, typename Derived>
VectorX<Scalar> matvec(const SparseSymMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() != m.cols() || x.cols() != 1) throw InvalidSpec("matvec dimension mismatch");
  return m * x;
}

/// Matrix Market coordinate export (real symmetric, lower triangle, 1-based).
template <typename Scalar>
void write_matrix_market(std::ostream& out, const SparseSymMatrix<Scalar>& m) {
  std::int64_t lower = 0;
  for (std::int64_t r = 0; r < m.outerSize(); ++r)
    for (typename SparseSymMatrix<Scalar>::InnerIterator it(m, r); it; ++it)
      if (it.col() <= r) ++lower;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.rows() << ' ' << m.cols() << ' ' << lower << '\n';
  for (std::int64_t r = 0; r < m.outerSize(); ++r)
    for (typename SparseSymMatrix<Scalar>::InnerIterator it(m, r); it; ++it)
      if (it.col() <= r) out << r + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace stratree
