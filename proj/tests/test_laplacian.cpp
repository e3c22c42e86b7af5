#include <doctest.h>

#include <random>
#include <sstream>

#include "stratree/laplacian.hpp"

using namespace stratree;

namespace {

Eigen::MatrixXd dense(const SparseSymMatrix<double>& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST_CASE("assemble: small cases") {
  SUBCASE("single vertex") {
    const auto l = dense(assemble(TreeIndex(SymmetricTreeSpec{})));
    CHECK(l.rows() == 1);
    CHECK(l(0, 0) == 0.0);
  }
  SUBCASE("star K_{1,2}") {
    const auto l = dense(assemble(TreeIndex(SymmetricTreeSpec({2}))));
    Eigen::Matrix3d expected;
    expected << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    CHECK(l == expected);
  }
  SUBCASE("[2,1] degrees") {
    const auto l = dense(assemble(TreeIndex(SymmetricTreeSpec({2, 1}))));
    Eigen::VectorXd d(5);
    d << 2, 2, 2, 1, 1;
    CHECK(l.diagonal() == d);
  }
}

TEST_CASE("Laplacian invariants") {
  for (const auto& children : std::vector<std::vector<std::uint32_t>>{{3}, {3, 2}, {2, 1, 3}, {4, 2, 2}}) {
    TreeIndex index{SymmetricTreeSpec(children)};
    const auto tree = index.to_rooted_tree();
    const auto l = assemble(index);
    const auto d = dense(l);
    CHECK(d == d.transpose());
    CHECK(d.rowwise().sum().isZero(0.0));
    for (Vertex v = 0; v < tree.vertex_count(); ++v) {
      CHECK(d(v, v) == static_cast<double>(tree.degree(v)));
      for (Vertex u : tree.neighbors(v)) CHECK(d(v, u) == -1.0);
    }
    CHECK(l.nonZeros() == tree.vertex_count() + 2 * (tree.vertex_count() - 1));
  }
}

TEST_CASE("quadratic form equals the sum of squared edge differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  TreeIndex index{SymmetricTreeSpec({3, 2, 2})};
  const auto tree = index.to_rooted_tree();
  const auto l = assemble(index);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(tree.vertex_count());
    for (auto& xi : x) xi = gauss(rng);
    double edges = 0;
    for (Vertex v = 0; v < tree.vertex_count(); ++v)
      if (auto p = tree.parent(v)) edges += (x[v] - x[*p]) * (x[v] - x[*p]);
    const double form = x.dot(matvec(l, x));
    CHECK(std::abs(form - edges) <= 1e-12 * edges);
  }
}

TEST_CASE("assemble_dirichlet") {
  SUBCASE("omega = V equals the full Laplacian") {
    TreeIndex index{SymmetricTreeSpec({2, 2})};
    const auto sub = index.subtree(0).vertices();
    CHECK(dense(assemble_dirichlet(index, sub)) == dense(assemble(index)));
  }
  SUBCASE("one leaf of K_{1,2}") {
    TreeIndex index{SymmetricTreeSpec({2})};
    const std::vector<Vertex> omega{2};
    const auto d = dense(assemble_dirichlet(index, omega));
    CHECK(d.rows() == 1);
    CHECK(d(0, 0) == 1.0);
  }
  SUBCASE("level-1 subtree of [2,2] keeps the parent edge in its degree") {
    TreeIndex index{SymmetricTreeSpec({2, 2})};
    const auto d = dense(assemble_dirichlet(index, index.subtree(1).vertices()));
    CHECK(d.diagonal() == Eigen::Vector3d(3, 1, 1));
    CHECK(d(0, 1) == -1.0);
    CHECK(d(0, 2) == -1.0);
    CHECK(d(1, 2) == 0.0);
  }
  SUBCASE("principal submatrix on an arbitrary subset") {
    TreeIndex index{SymmetricTreeSpec({3, 2})};
    const auto full = dense(assemble(index));
    const std::vector<Vertex> omega{7, 0, 2, 5};
    const auto d = dense(assemble_dirichlet(index, omega));
    const std::vector<Vertex> sorted{0, 2, 5, 7};
    for (std::size_t i = 0; i < sorted.size(); ++i)
      for (std::size_t j = 0; j < sorted.size(); ++j)
        CHECK(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == full(sorted[i], sorted[j]));
  }
  SUBCASE("errors") {
    TreeIndex index{SymmetricTreeSpec({2})};
    CHECK_THROWS_AS(assemble_dirichlet(index, std::vector<Vertex>{}), InvalidSpec);
    CHECK_THROWS_AS(assemble_dirichlet(index, std::vector<Vertex>{1, 1}), InvalidSpec);
  }
}

TEST_CASE("matvec") {
  SUBCASE("all-ones is in the kernel") {
    TreeIndex index{SymmetricTreeSpec({3, 2, 2})};
    const auto y = matvec(assemble(index), Eigen::VectorXd::Ones(index.vertex_count()));
    CHECK(y.isZero(0.0));
  }
  SUBCASE("single vertex") {
    const auto y = matvec(assemble(TreeIndex(SymmetricTreeSpec{})), Eigen::VectorXd::Constant(1, 5.0));
    CHECK(y[0] == 0.0);
  }
  SUBCASE("antisymmetric leaf vector of K_{1,2} is a lambda=1 eigenvector") {
    const auto y = matvec(assemble(TreeIndex(SymmetricTreeSpec({2}))), Eigen::Vector3d(0, 1, -1));
    CHECK(y == Eigen::Vector3d(0, 1, -1));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(matvec(assemble(TreeIndex(SymmetricTreeSpec({2}))), Eigen::Vector2d(1, 1)), InvalidSpec);
  }
}

TEST_CASE("Matrix Market export") {
  std::ostringstream out;
  write_matrix_market(out, assemble(TreeIndex(SymmetricTreeSpec({2}))));
  CHECK(out.str() ==
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "3 3 5\n"
        "1 1 2\n"
        "2 1 -1\n"
        "2 2 1\n"
        "3 1 -1\n"
        "3 3 1\n");
}
