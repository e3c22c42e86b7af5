#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "stratree/population.hpp"
#include "stratree/tree.hpp"
#include "stratree/tridiagonal.hpp"

namespace stratree {

inline constexpr Vertex kDefaultBasisCap = 100000;

/// Level recurrence of stratified eigenfunctions on a subtree rooted at
/// `origin_level`: row i is  d(l) g(l) - g(l-1) - c(l) g(l+1)  for l = l0+i,
/// with g(l0-1) = 0. Nonsymmetric tridiagonal.
struct LevelRecurrence {
  Eigen::VectorXd diag;   // d(l0..k-1), parent edge counted below the root
  Eigen::VectorXd upper;  // -c(l)
  Eigen::VectorXd lower;  // -1
  int origin_level = 0;

  Eigen::Index size() const { return diag.size(); }
  Eigen::MatrixXd to_dense() const;
};

LevelRecurrence build_level_recurrence(const SymmetricTreeSpec& spec, int origin_level);

/// Symmetric form R S R^{-1}, R = diag((-1)^i sqrt(n_rel(i))). Off-diagonals
/// become sqrt(c(l)); the diagonal is untouched.
TriDiag<double> balance(const LevelRecurrence& s);

/// Maps an eigenvector of balance(S) back to an eigenvector of S (R^{-1} u),
/// scaled by populations relative to the subtree root.
Eigen::VectorXd pull_back(const SymmetricTreeSpec& spec, int origin_level, const Eigen::VectorXd& u);

struct SpectralLine {
  double lambda = 0;
  Count multiplicity = 0;
  int origin_level = 0;  // subtree root level whose recurrence produced lambda
  int position = 0;      // 0-based index within that recurrence's spectrum
};

/// Full Laplacian spectrum of the tree without building it: one line per
/// eigenvalue of each balanced recurrence, sorted by lambda then origin.
/// Levels whose multiplicity n(l0)-n(l0-1) is zero contribute no lines.
/// `jobs` > 1 solves the recurrences on worker threads.
std::vector<SpectralLine> decompose_spectrum(const SymmetricTreeSpec& spec, int jobs = 1);

/// Eigenvalues with multiplicity, sorted. Throws ResourceLimit when the
/// expansion would exceed `cap` entries.
std::vector<double> expand_spectrum(std::span<const SpectralLine> lines, std::size_t cap = 1u << 24);

Count total_multiplicity(std::span<const SpectralLine> lines);

/// sum_{i=1}^{k-1} (k-i)(n(i)-n(i-1)) + k, alongside |V|.
struct CountingIdentity {
  Count lhs = 0;
  Count vertex_count = 0;
};
CountingIdentity counting_identity(const SymmetricTreeSpec& spec);

/// One value per level of a subtree; the subtree-root value is nonzero.
class StratifiedVector {
 public:
  StratifiedVector(Eigen::VectorXd values, int origin_level);

  const Eigen::VectorXd& values() const { return values_; }
  int origin_level() const { return origin_level_; }

 private:
  Eigen::VectorXd values_;
  int origin_level_;
};

/// Vector equal to g(l) on every vertex of T_v at level l, zero elsewhere.
Eigen::VectorXd stratified_lift(const TreeIndex& index, Vertex v, const StratifiedVector& g);

/// For a Dirichlet eigenfunction f on T_v with f(v) != 0, the |C_p|-1
/// vectors f - tau(i,j) f over the siblings j of v (p = parent of v).
std::vector<Eigen::VectorXd> antisym_lift(const TreeIndex& index, Vertex v, const Eigen::VectorXd& f);

/// Average of f over relabelings of the children of v.
Eigen::VectorXd symmetrize(const TreeIndex& index, Vertex v, const Eigen::VectorXd& f);

enum class Construction { stratified, antisym };
std::string_view to_string(Construction c);

struct EigenPair {
  double lambda = 0;
  Eigen::VectorXd vector;  // scaled to unit max-norm
  int origin_level = 0;
  Construction construction = Construction::stratified;
  double residual = 0;  // ||L f - lambda f||_inf / ||f||_inf
};

struct EigenBasis {
  Vertex vertex_count = 0;
  std::vector<EigenPair> pairs;  // sorted by lambda, then origin level

  double max_residual() const;
  Eigen::VectorXd values() const;
  Eigen::MatrixXd vectors() const;  // one column per pair
};

/// Complete eigenbasis from stratified eigenfunctions and their antisymmetric
/// lifts. Residuals are measured against the assembled sparse Laplacian.
/// Throws ResourceLimit when |V| > cap.
EigenBasis full_eigenbasis(const SymmetricTreeSpec& spec, Vertex cap = kDefaultBasisCap);

/// Numerical rank via modified Gram-Schmidt on unit-normalized columns; a
/// column whose remaining 2-norm falls below `pivot` is dependent.
Eigen::Index gram_schmidt_rank(const Eigen::MatrixXd& columns, double pivot = 1e-8);

namespace detail {

// Eigenpairs of the stratified recurrence at `origin_level` pulled back to
// level values (one StratifiedVector per eigenvalue, ascending).
struct StratifiedFamily {
  Eigen::VectorXd values;
  std::vector<StratifiedVector> vectors;
};
StratifiedFamily stratified_family(const SymmetricTreeSpec& spec, int origin_level);

// Antisymmetric eigenpairs whose subtree roots sit on `origin_level` >= 1,
// unscaled and without residuals.
std::vector<EigenPair> antisym_pairs(const TreeIndex& index, int origin_level);

}  // namespace detail

}  // namespace stratree
