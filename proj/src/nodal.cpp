#include "stratree/nodal.hpp"

#include <algorithm>
#include <cmath>

#include "stratree/dense_eigen.hpp"
#include "stratree/laplacian.hpp"

namespace stratree {

namespace {

std::vector<int> signs(const Eigen::VectorXd& f, double zero_tol) {
  const double threshold = zero_tol * f.lpNorm<Eigen::Infinity>();
  std::vector<int> s(static_cast<std::size_t>(f.size()));
  for (Eigen::Index u = 0; u < f.size(); ++u) {
    if (std::abs(f[u]) <= threshold) s[u] = 0;
    else s[u] = f[u] > 0 ? 1 : -1;
  }
  return s;
}

}  // namespace

SignGraphReport count_sign_graphs(const RootedTree& tree, const Eigen::VectorXd& f, double zero_tol) {
  if (f.size() != tree.vertex_count()) throw InvalidSpec("function length does not match the tree");
  const auto s = signs(f, zero_tol);
  SignGraphReport report;
  // In a forest, components = vertices - edges.
  for (Vertex u = 0; u < tree.vertex_count(); ++u) {
    if (s[u] > 0) ++report.positive_count;
    else if (s[u] < 0) ++report.negative_count;
    else ++report.zero_count;
    const auto p = tree.parent(u);
    if (p && s[u] != 0 && s[*p] == s[u]) {
      if (s[u] > 0) --report.positive_count;
      else --report.negative_count;
    }
  }
  return report;
}

std::vector<Cluster> cluster_sorted(const Eigen::VectorXd& values, double tol) {
  std::vector<Cluster> out(static_cast<std::size_t>(values.size()));
  Eigen::Index start = 0;
  for (Eigen::Index i = 0; i <= values.size(); ++i) {
    if (i == values.size() || (i > 0 && values[i] - values[i - 1] > tol)) {
      for (Eigen::Index j = start; j < i; ++j) out[j] = {start + 1, i - start};
      start = i;
    }
  }
  return out;
}

std::vector<NodalResult> courant_check(const RootedTree& tree, const Eigen::VectorXd& values,
                                       const Eigen::MatrixXd& vectors, const NodalOptions& options) {
  const auto clusters = cluster_sorted(values, options.cluster_tol);
  std::vector<NodalResult> out;
  out.reserve(clusters.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    NodalResult r;
    r.lambda = values[i];
    r.position = clusters[i].start;
    r.multiplicity = clusters[i].size;
    r.sign_graphs = count_sign_graphs(tree, vectors.col(i), options.zero_tol).total();
    r.bound = r.position + r.multiplicity - 1;
    r.pass = r.sign_graphs <= r.bound;
    out.push_back(r);
  }
  return out;
}

std::vector<NodalResult> zero_free_check(const RootedTree& tree, const Eigen::VectorXd& values,
                                         const Eigen::MatrixXd& vectors, const NodalOptions& options) {
  const auto clusters = cluster_sorted(values, options.cluster_tol);
  std::vector<NodalResult> out;
  out.reserve(clusters.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto report = count_sign_graphs(tree, vectors.col(i), options.zero_tol);
    NodalResult r;
    r.lambda = values[i];
    r.position = clusters[i].start;
    r.multiplicity = clusters[i].size;
    r.sign_graphs = report.total();
    r.bound = r.position;
    r.applicable = report.zero_count == 0;
    r.pass = !r.applicable || (r.multiplicity == 1 && r.sign_graphs == r.position);
    out.push_back(r);
  }
  return out;
}

std::vector<Vertex> common_vanishing(const Eigen::MatrixXd& eigenvectors, double zero_tol) {
  Eigen::VectorXd threshold(eigenvectors.cols());
  for (Eigen::Index j = 0; j < eigenvectors.cols(); ++j)
    threshold[j] = zero_tol * eigenvectors.col(j).lpNorm<Eigen::Infinity>();
  std::vector<Vertex> zeros;
  for (Eigen::Index u = 0; u < eigenvectors.rows(); ++u) {
    bool vanishes = true;
    for (Eigen::Index j = 0; j < eigenvectors.cols() && vanishes; ++j)
      vanishes = std::abs(eigenvectors(u, j)) <= threshold[j];
    if (vanishes) zeros.push_back(u);
  }
  return zeros;
}

Eigen::MatrixXd random_recombination(const Eigen::MatrixXd& eigenvectors, std::mt19937_64& rng) {
  const Eigen::Index r = eigenvectors.cols();
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  Eigen::MatrixXd lower = Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) lower(i, j) = entry(rng);
    upper(i, i) = scale(rng);
    for (Eigen::Index j = i + 1; j < r; ++j) upper(i, j) = entry(rng);
  }
  return eigenvectors * (lower * upper);
}

VanishingStructure vanishing_structure(const RootedTree& tree, double lambda, const Eigen::MatrixXd& eigenvectors,
                                       double zero_tol, double cluster_tol) {
  VanishingStructure out;
  out.lambda = lambda;
  out.zeros = common_vanishing(eigenvectors, zero_tol);
  out.applicable = !out.zeros.empty();
  if (!out.applicable) return out;

  const Vertex n = tree.vertex_count();
  std::vector<bool> removed(static_cast<std::size_t>(n), false);
  for (Vertex z : out.zeros) removed[z] = true;
  std::vector<bool> seen = removed;
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    VanishingComponent comp;
    std::vector<Vertex> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      comp.vertices.push_back(v);
      for (Vertex u : tree.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.vertices.begin(), comp.vertices.end());

    const Eigen::MatrixXd dirichlet = Eigen::MatrixXd(assemble_dirichlet(tree, comp.vertices));
    const auto eig = dense_eigen(dirichlet);
    Eigen::Index below = 0, match = -1;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values[i] < lambda - cluster_tol) ++below;
      else if (std::abs(eig.values[i] - lambda) <= cluster_tol) {
        ++comp.multiplicity;
        match = i;
      }
    }
    comp.position = below + 1;
    if (comp.multiplicity == 1) {
      const Eigen::VectorXd phi = eig.values.size() ? Eigen::VectorXd(eig.vectors.col(match)) : Eigen::VectorXd();
      comp.has_zero_free_eigenfunction = common_vanishing(phi, zero_tol).empty();
    }
    out.sign_graph_bound += comp.position;
    out.pass = out.pass && comp.multiplicity == 1 && comp.has_zero_free_eigenfunction;
    out.components.push_back(std::move(comp));
  }

  for (Eigen::Index j = 0; j < eigenvectors.cols(); ++j)
    out.max_sign_graphs =
        std::max(out.max_sign_graphs, count_sign_graphs(tree, eigenvectors.col(j), zero_tol).total());
  out.pass = out.pass && out.max_sign_graphs <= out.sign_graph_bound;
  return out;
}

}  // namespace stratree
