#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "stratree/rojo.hpp"
#include "stratree/tree.hpp"
#include "stratree/tridiagonal.hpp"

namespace stratree {

enum class Side { left, right, stratified };
std::string_view to_string(Side side);

struct GluedSpectralLine {
  double lambda = 0;
  Count multiplicity = 0;
  Side side = Side::stratified;
  int origin_level = 0;  // subtree root level within its side; 0 for stratified lines
  int position = 0;
};

/// Stratified recurrence on signed levels. Rows run from the deepest right
/// level through the shared root to the deepest left level; the root row
/// has degree c_left(0) + c_right(0).
LevelRecurrence glued_level_recurrence(const GluedTreeSpec& spec);

/// Balanced (symmetric) form of glued_level_recurrence.
TriDiag<double> glued_stratified_matrix(const GluedTreeSpec& spec);

/// Root-vanishing families of each side plus the k1+k2-1 stratified
/// eigenvalues, sorted by lambda.
std::vector<GluedSpectralLine> glued_spectrum(const GluedTreeSpec& spec, int jobs = 1);

std::vector<double> expand_spectrum(std::span<const GluedSpectralLine> lines, std::size_t cap = 1u << 24);
Count total_multiplicity(std::span<const GluedSpectralLine> lines);

/// Signed level of every vertex in the realize_glued layout.
std::vector<int> glued_signed_levels(const GluedTreeSpec& spec);

struct GluedEigenPair {
  EigenPair pair;
  Side side = Side::stratified;
};

struct GluedEigenBasis {
  Vertex vertex_count = 0;
  std::vector<GluedEigenPair> pairs;  // sorted by lambda

  double max_residual() const;
  Eigen::VectorXd values() const;
  Eigen::MatrixXd vectors() const;
};

/// Complete eigenbasis of the glued tree in the realize_glued layout.
GluedEigenBasis glued_eigenbasis(const GluedTreeSpec& spec, Vertex cap = kDefaultBasisCap);

}  // namespace stratree
