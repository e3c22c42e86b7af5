#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Jacobi>

#include "stratree/population.hpp"

namespace stratree {

inline constexpr Eigen::Index kDefaultOracleCap = 2000;

template <typename Scalar = double>
struct DenseEigen {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;               // nondecreasing
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // orthonormal columns
};

/// Brute-force symmetric eigensolver (cyclic Jacobi). Only the lower
/// triangle is trusted to be symmetric with the upper one; callers build M
/// symmetric. Refuses matrices larger than `cap`.
template <typename Derived>
DenseEigen<typename Derived::Scalar> dense_eigen(const Eigen::MatrixBase<Derived>& m,
                                                  Eigen::Index cap = kDefaultOracleCap) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw InvalidSpec("dense_eigen needs a square matrix");
  if (n > cap)
    throw ResourceLimit("dense oracle refused: dimension " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));

  Matrix a = m;
  Matrix v = Matrix::Identity(n, n);
  const Scalar target = Scalar(1e-12) * a.norm();

  auto off_norm = [&] {
    Scalar s = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j + 1; i < n; ++i) s += a(i, j) * a(i, j);
    return std::sqrt(2 * s);
  };

  int sweep = 0;
  for (; sweep < 100 && off_norm() > target; ++sweep) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(q, p) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a(p, p), a(q, p), a(q, q));
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        a(p, q) = a(q, p) = Scalar(0);
        v.applyOnTheRight(p, q, rot);
      }
    }
  }
  if (sweep == 100) throw std::runtime_error("Jacobi iteration did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  DenseEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

}  // namespace stratree
