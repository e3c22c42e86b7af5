#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "stratree/tree.hpp"

namespace stratree {

/// Strong nodal domains of a function on a tree.
struct SignGraphReport {
  std::int64_t positive_count = 0;
  std::int64_t negative_count = 0;
  std::int64_t zero_count = 0;

  std::int64_t total() const { return positive_count + negative_count; }
};

/// Counts maximal connected subgraphs where f > 0 and where f < 0. Entries
/// with |f_u| <= zero_tol * ||f||_inf count as zeros; zero_tol = 0 uses the
/// exact sign of each stored value.
SignGraphReport count_sign_graphs(const RootedTree& tree, const Eigen::VectorXd& f, double zero_tol = 0.0);

/// Position (1-based) and size of the multiplicity cluster of each sorted
/// eigenvalue; consecutive values closer than `tol` share a cluster.
struct Cluster {
  Eigen::Index start = 1;
  Eigen::Index size = 1;
};
std::vector<Cluster> cluster_sorted(const Eigen::VectorXd& values, double tol = 1e-8);

struct NodalOptions {
  double cluster_tol = 1e-8;
  double zero_tol = 0.0;  // see count_sign_graphs
};

struct NodalResult {
  double lambda = 0;
  Eigen::Index position = 0;      // 1-based, first index of its cluster
  Eigen::Index multiplicity = 0;  // cluster size
  std::int64_t sign_graphs = 0;
  std::int64_t bound = 0;
  bool applicable = true;
  bool pass = true;
};

/// Courant-type bound: a lambda_k eigenfunction with lambda_k of
/// multiplicity r has at most k + r - 1 sign graphs. `values` sorted
/// ascending; `vectors` holds matching columns.
std::vector<NodalResult> courant_check(const RootedTree& tree, const Eigen::VectorXd& values,
                                       const Eigen::MatrixXd& vectors, const NodalOptions& options = {});

/// On trees, an eigenfunction without vanishing coordinates belongs to a
/// simple eigenvalue lambda_k and has exactly k sign graphs. Pairs with a
/// vanishing coordinate are reported as not applicable (and pass).
std::vector<NodalResult> zero_free_check(const RootedTree& tree, const Eigen::VectorXd& values,
                                         const Eigen::MatrixXd& vectors, const NodalOptions& options = {});

/// Vertices where every column of `eigenvectors` vanishes, each column
/// judged against zero_tol * its own max-norm. Sorted.
std::vector<Vertex> common_vanishing(const Eigen::MatrixXd& eigenvectors, double zero_tol = 1e-9);

/// Columns mixed by a random invertible matrix (unit lower triangular times
/// upper triangular with diagonal in [0.5, 2]).
Eigen::MatrixXd random_recombination(const Eigen::MatrixXd& eigenvectors, std::mt19937_64& rng);

/// Structure of an eigenspace whose eigenfunctions all vanish somewhere:
/// common zeros Z, the components of G - Z, and the position of lambda in
/// each component's Dirichlet spectrum.
struct VanishingComponent {
  std::vector<Vertex> vertices;
  Eigen::Index position = 0;       // 1-based position of lambda in the Dirichlet spectrum
  Eigen::Index multiplicity = 0;   // how often lambda occurs there (expected 1)
  bool has_zero_free_eigenfunction = false;
};

struct VanishingStructure {
  double lambda = 0;
  std::vector<Vertex> zeros;
  std::vector<VanishingComponent> components;
  std::int64_t sign_graph_bound = 0;  // sum of positions
  std::int64_t max_sign_graphs = 0;   // over the supplied eigenvectors
  bool applicable = false;            // Z nonempty
  bool pass = true;
};

/// Checks that lambda is a simple Dirichlet eigenvalue with a zero-free
/// eigenfunction on every component of G - Z, and that no supplied
/// eigenvector exceeds the summed positions in sign graphs.
VanishingStructure vanishing_structure(const RootedTree& tree, double lambda, const Eigen::MatrixXd& eigenvectors,
                                       double zero_tol = 1e-9, double cluster_tol = 1e-8);

}  // namespace stratree
