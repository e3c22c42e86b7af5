#include <doctest.h>

#include <random>

#include "stratree/dense_eigen.hpp"
#include "stratree/laplacian.hpp"
#include "stratree/nodal.hpp"
#include "stratree/rojo.hpp"

using namespace stratree;

namespace {

RootedTree tree_of(std::vector<std::uint32_t> c) { return TreeIndex(SymmetricTreeSpec(std::move(c))).to_rooted_tree(); }

}  // namespace

TEST_CASE("count_sign_graphs") {
  const auto star = tree_of({2});
  SUBCASE("constant function") {
    const auto r = count_sign_graphs(star, Eigen::Vector3d(1, 1, 1));
    CHECK(r.positive_count == 1);
    CHECK(r.negative_count == 0);
    CHECK(r.total() == 1);
  }
  SUBCASE("zero at the centre splits the leaves") {
    const auto r = count_sign_graphs(star, Eigen::Vector3d(0, 1, -1));
    CHECK(r.positive_count == 1);
    CHECK(r.negative_count == 1);
    CHECK(r.zero_count == 1);
  }
  SUBCASE("zeros disconnect same-sign regions") {
    const auto r = count_sign_graphs(tree_of({3}), Eigen::Vector4d(0, 1, 1, 1));
    CHECK(r.positive_count == 3);
  }
  SUBCASE("alternating signs on a path") {
    const auto path = tree_of({1, 1, 1});
    CHECK(count_sign_graphs(path, Eigen::Vector4d(1, -1, 1, -1)).total() == 4);
    CHECK(count_sign_graphs(path, Eigen::Vector4d(1, 2, -1, -2)).total() == 2);
  }
  SUBCASE("tolerance treats tiny entries as zeros") {
    const Eigen::Vector3d f(1e-14, 1, -1);
    CHECK(count_sign_graphs(star, f).total() == 2);
    CHECK(count_sign_graphs(star, f, 1e-9).zero_count == 1);
    const Eigen::Vector3d g(1e-14, 1, 1);
    CHECK(count_sign_graphs(star, g).total() == 1);
    CHECK(count_sign_graphs(star, g, 1e-9).total() == 2);
  }
  SUBCASE("invariant under scaling and negation") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss;
    const auto tree = tree_of({3, 2, 2});
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd f(tree.vertex_count());
      for (auto& x : f) x = gauss(rng);
      const auto base = count_sign_graphs(tree, f);
      const auto neg = count_sign_graphs(tree, -f);
      CHECK(neg.positive_count == base.negative_count);
      CHECK(neg.negative_count == base.positive_count);
      CHECK(count_sign_graphs(tree, 3.5 * f).total() == base.total());
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(count_sign_graphs(star, Eigen::Vector2d(1, 1)), InvalidSpec);
  }
}

TEST_CASE("cluster_sorted") {
  Eigen::VectorXd v(6);
  v << 0, 1, 1 + 1e-12, 1 + 2e-12, 2, 3;
  const auto c = cluster_sorted(v);
  REQUIRE(c.size() == 6);
  CHECK(c[0].start == 1);
  CHECK(c[0].size == 1);
  for (int i = 1; i <= 3; ++i) {
    CHECK(c[static_cast<std::size_t>(i)].start == 2);
    CHECK(c[static_cast<std::size_t>(i)].size == 3);
  }
  CHECK(c[4].start == 5);
  CHECK(c[5].size == 1);
}

TEST_CASE("courant_check") {
  SUBCASE("K_{1,2} at lambda = 1") {
    const auto tree = tree_of({2});
    const auto eig = dense_eigen(Eigen::MatrixXd(assemble(TreeIndex(SymmetricTreeSpec({2})))));
    const auto res = courant_check(tree, eig.values, eig.vectors, {1e-8, 1e-9});
    REQUIRE(res.size() == 3);
    CHECK(res[1].position == 2);
    CHECK(res[1].multiplicity == 1);
    CHECK(res[1].bound == 2);
    CHECK(res[1].sign_graphs == 2);
    for (const auto& r : res) CHECK(r.pass);
  }
  SUBCASE("the bound catches a bad pairing") {
    const auto tree = tree_of({1, 1});
    Eigen::Vector3d values(0, 1, 3);
    Eigen::Matrix3d vectors;
    vectors.col(0) << 1, -1, 1;  // three sign graphs claimed for lambda_1
    vectors.col(1) << 1, 0, -1;
    vectors.col(2) << 1, -2, 1;
    const auto res = courant_check(tree, values, vectors);
    CHECK_FALSE(res[0].pass);
    CHECK(res[1].pass);
    CHECK(res[2].pass);
  }
  SUBCASE("multiplicity widens the bound") {
    const auto tree = tree_of({3});
    const auto eig = dense_eigen(Eigen::MatrixXd(assemble(TreeIndex(SymmetricTreeSpec({3})))));
    const auto res = courant_check(tree, eig.values, eig.vectors, {1e-8, 1e-9});
    CHECK(res[1].position == 2);
    CHECK(res[1].multiplicity == 2);
    CHECK(res[1].bound == 3);
    CHECK(res[2].bound == 3);
  }
  SUBCASE("every oracle eigenvector of a sweep of trees") {
    for (const auto& c : std::vector<std::vector<std::uint32_t>>{{3, 2}, {2, 2, 2}, {2, 1, 3}, {4, 1, 2}}) {
      const auto eig = dense_eigen(Eigen::MatrixXd(assemble(TreeIndex(SymmetricTreeSpec(c)))));
      for (const auto& r : courant_check(tree_of(c), eig.values, eig.vectors, {1e-8, 1e-9})) CHECK(r.pass);
    }
  }
}

TEST_CASE("zero_free_check") {
  SUBCASE("path on two vertices") {
    const auto tree = tree_of({1});
    Eigen::Matrix2d vectors;
    vectors << 1, 1, 1, -1;
    const auto res = zero_free_check(tree, Eigen::Vector2d(0, 2), vectors);
    REQUIRE(res.size() == 2);
    CHECK(res[1].applicable);
    CHECK(res[1].sign_graphs == 2);
    CHECK(res[1].pass);
  }
  SUBCASE("vanishing eigenvectors are not applicable") {
    const auto tree = tree_of({2});
    Eigen::Matrix3d vectors;
    vectors.col(0) << 1, 1, 1;
    vectors.col(1) << 0, 1, -1;
    vectors.col(2) << 2, -1, -1;
    const auto res = zero_free_check(tree, Eigen::Vector3d(0, 1, 3), vectors);
    CHECK(res[0].applicable);
    CHECK_FALSE(res[1].applicable);
    CHECK(res[1].pass);
    CHECK(res[2].applicable);
    CHECK(res[2].sign_graphs == 3);
    CHECK(res[2].pass);
  }
  SUBCASE("wrong sign count is flagged") {
    const auto tree = tree_of({1});
    Eigen::Matrix2d vectors;
    vectors << 1, 1, 1, 1;
    const auto res = zero_free_check(tree, Eigen::Vector2d(0, 2), vectors);
    CHECK_FALSE(res[1].pass);
  }
  SUBCASE("constructed bases satisfy both checks") {
    for (const auto& c : std::vector<std::vector<std::uint32_t>>{{3, 2}, {2, 3, 2}, {1, 2, 1, 2}}) {
      const auto basis = full_eigenbasis(SymmetricTreeSpec(c));
      const auto tree = tree_of(c);
      for (const auto& r : zero_free_check(tree, basis.values(), basis.vectors())) CHECK(r.pass);
      for (const auto& r : courant_check(tree, basis.values(), basis.vectors())) CHECK(r.pass);
    }
  }
}

TEST_CASE("common_vanishing") {
  SUBCASE("K_{1,2} lambda = 1") {
    Eigen::MatrixXd v(3, 1);
    v << 0, 1, -1;
    CHECK(common_vanishing(v) == std::vector<Vertex>{0});
  }
  SUBCASE("star with three leaves, lambda = 1 eigenspace") {
    Eigen::MatrixXd v(4, 2);
    v << 0, 0, 1, 1, -1, 0, 0, -1;
    CHECK(common_vanishing(v) == std::vector<Vertex>{0});
  }
  SUBCASE("nothing in common") {
    Eigen::MatrixXd v(3, 2);
    v << 0, 1, 1, 0, -1, 2;
    CHECK(common_vanishing(v).empty());
  }
}

TEST_CASE("common zero set survives random recombination") {
  std::mt19937_64 rng(42);
  for (const auto& c : std::vector<std::vector<std::uint32_t>>{{3}, {3, 2}, {2, 2, 2}, {3, 1, 2}}) {
    const SymmetricTreeSpec spec(c);
    const auto basis = full_eigenbasis(spec);
    const auto values = basis.values();
    const auto vectors = basis.vectors();
    for (const auto& cl : cluster_sorted(values)) {
      if (cl.size < 2) continue;
      const Eigen::MatrixXd block = vectors.middleCols(cl.start - 1, cl.size);
      const auto zeros = common_vanishing(block);
      for (int trial = 0; trial < 5; ++trial) CHECK(common_vanishing(random_recombination(block, rng)) == zeros);
    }
  }
}

TEST_CASE("vanishing_structure") {
  SUBCASE("star with three leaves at lambda = 1") {
    const auto tree = tree_of({3});
    Eigen::MatrixXd v(4, 2);
    v << 0, 0, 1, 1, -1, 0, 0, -1;
    const auto s = vanishing_structure(tree, 1.0, v);
    CHECK(s.applicable);
    CHECK(s.zeros == std::vector<Vertex>{0});
    REQUIRE(s.components.size() == 3);
    for (const auto& comp : s.components) {
      CHECK(comp.position == 1);
      CHECK(comp.multiplicity == 1);
      CHECK(comp.has_zero_free_eigenfunction);
    }
    CHECK(s.sign_graph_bound == 3);
    CHECK(s.max_sign_graphs == 2);
    CHECK(s.pass);
  }
  SUBCASE("zero-free eigenspace is not applicable") {
    Eigen::MatrixXd v(3, 1);
    v << 1, 1, 1;
    const auto s = vanishing_structure(tree_of({2}), 0.0, v);
    CHECK_FALSE(s.applicable);
    CHECK(s.pass);
  }
  SUBCASE("every vanishing eigenspace of a sweep of trees") {
    for (const auto& c : std::vector<std::vector<std::uint32_t>>{{3, 2}, {2, 2, 2}, {2, 3, 2}, {3, 1, 3}, {2, 2, 1, 2}}) {
      const SymmetricTreeSpec spec(c);
      const auto tree = tree_of(c);
      const auto eig = dense_eigen(Eigen::MatrixXd(assemble(TreeIndex(spec))));
      int applicable = 0;
      const auto clusters = cluster_sorted(eig.values);
      for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (static_cast<Eigen::Index>(i) != clusters[i].start - 1) continue;
        const auto block = eig.vectors.middleCols(clusters[i].start - 1, clusters[i].size);
        const auto s = vanishing_structure(tree, eig.values[static_cast<Eigen::Index>(i)], block);
        CHECK(s.pass);
        applicable += s.applicable ? 1 : 0;
      }
      CHECK(applicable > 0);
    }
  }
}
