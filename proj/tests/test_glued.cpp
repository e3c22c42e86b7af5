#include <doctest.h>

#include <cmath>

#include "stratree/dense_eigen.hpp"
#include "stratree/glued.hpp"
#include "stratree/laplacian.hpp"

using namespace stratree;

namespace {

GluedTreeSpec glue(std::vector<std::uint32_t> left, std::vector<std::uint32_t> right) {
  return {SymmetricTreeSpec(std::move(left)), SymmetricTreeSpec(std::move(right))};
}

Eigen::VectorXd oracle(const GluedTreeSpec& spec) {
  return dense_eigen(Eigen::MatrixXd(assemble(realize_glued(spec)))).values;
}

double gap(const std::vector<double>& a, const Eigen::VectorXd& b) {
  REQUIRE(static_cast<Eigen::Index>(a.size()) == b.size());
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[static_cast<Eigen::Index>(i)]));
  return worst;
}

}  // namespace

TEST_CASE("glued_level_recurrence") {
  SUBCASE("[2] + [3]") {
    const auto s = glued_level_recurrence(glue({2}, {3}));
    CHECK(s.diag == Eigen::Vector3d(1, 5, 1));
    const auto t = tridiag_eigen(glued_stratified_matrix(glue({2}, {3})), false);
    CHECK(std::abs(t.values[0]) < 1e-14);
    CHECK(std::abs(t.values[1] - 1) < 1e-14);
    CHECK(std::abs(t.values[2] - 6) < 1e-14);
  }
  SUBCASE("empty left side reduces to the level recurrence of the right tree") {
    const SymmetricTreeSpec right({3, 2});
    const auto s = glued_level_recurrence({SymmetricTreeSpec{}, right});
    const auto plain = build_level_recurrence(right, 0);
    CHECK(s.size() == plain.size());
    const auto a = tridiag_eigen(glued_stratified_matrix({SymmetricTreeSpec{}, right}), false).values;
    const auto b = tridiag_eigen(balance(plain), false).values;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("dimension is k1 + k2 - 1") {
    CHECK(glued_level_recurrence(glue({2, 2}, {3, 1, 2})).size() == 3 + 4 - 1);
  }
}

TEST_CASE("glued_spectrum: frozen reference spectra") {
  const double r3 = std::sqrt(3.0);
  const std::vector<std::pair<GluedTreeSpec, std::vector<double>>> cases{
      {glue({2}, {3}), {0, 1, 1, 1, 1, 6}},
      {glue({2, 2}, {2, 2}), {0, 2 - r3, 2 - r3, 2 - r3, 1, 1, 1, 1, 4 - r3, 2 + r3, 2 + r3, 2 + r3, 4 + r3}},
      {glue({2, 3}, {1}),
       {0, 0.20871215252207945, 0.63853123381417276, 1, 1, 1, 1, 2.8325508088914657, 4.7912878474779204,
        5.5289179572943628}},
  };
  for (const auto& [spec, values] : cases) {
    auto expected = values;
    std::sort(expected.begin(), expected.end());
    const auto lines = glued_spectrum(spec);
    CHECK(total_multiplicity(lines) == spec.vertex_count());
    const auto got = expand_spectrum(lines);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-12);
  }
}

TEST_CASE("glued_spectrum: sides are labelled and symmetric under swapping") {
  const auto a = glued_spectrum(glue({3, 2}, {2, 1, 2}));
  const auto b = glued_spectrum(glue({2, 1, 2}, {3, 2}));
  const auto ea = expand_spectrum(a), eb = expand_spectrum(b);
  REQUIRE(ea.size() == eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) CHECK(std::abs(ea[i] - eb[i]) < 1e-12);
  Count left = 0, right = 0;
  for (const auto& l : a) {
    if (l.side == Side::left) left += l.multiplicity;
    if (l.side == Side::right) right += l.multiplicity;
  }
  Count left_b = 0, right_b = 0;
  for (const auto& l : b) {
    if (l.side == Side::left) left_b += l.multiplicity;
    if (l.side == Side::right) right_b += l.multiplicity;
  }
  CHECK(left == right_b);
  CHECK(right == left_b);
}

TEST_CASE("glued_spectrum matches the dense oracle") {
  int tested = 0;
  for (std::uint32_t a = 1; a <= 3; ++a)
    for (std::uint32_t b = 1; b <= 3; ++b)
      for (std::uint32_t c = 1; c <= 3; ++c) {
        for (const auto& spec : {glue({a, b}, {c}), glue({a}, {b, c}), glue({a, b, c}, {2, a}), glue({}, {a, c})}) {
          if (spec.vertex_count() > 300) continue;
          ++tested;
          CHECK(gap(expand_spectrum(glued_spectrum(spec)), oracle(spec)) < 1e-8);
        }
      }
  CHECK(tested > 50);
}

TEST_CASE("glued_signed_levels") {
  const auto levels = glued_signed_levels(glue({2}, {3}));
  CHECK(levels == std::vector<int>{0, 1, 1, -1, -1, -1});
}

TEST_CASE("glued_eigenbasis") {
  for (const auto& spec : {glue({2}, {3}), glue({2, 2}, {2, 2}), glue({2, 3}, {1}), glue({3, 1, 2}, {2, 2}),
                           glue({}, {3, 2})}) {
    const auto basis = glued_eigenbasis(spec);
    CHECK(static_cast<Count>(basis.pairs.size()) == spec.vertex_count());
    CHECK(basis.max_residual() <= 1e-9);
    CHECK(gram_schmidt_rank(basis.vectors()) == basis.vertex_count);
    const auto ref = oracle(spec);
    CHECK((basis.values() - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK_THROWS_AS(glued_eigenbasis(glue({3, 3}, {3}), 10), ResourceLimit);
}
