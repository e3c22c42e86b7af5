#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "stratree/population.hpp"

namespace stratree {

/// Symmetric tridiagonal matrix: `diag` has m entries, `offdiag` m-1.
template <typename Scalar = double>
struct TriDiag {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector diag;
  Vector offdiag;

  TriDiag() = default;
  TriDiag(Vector d, Vector e) : diag(std::move(d)), offdiag(std::move(e)) {
    if (diag.size() < 1 || offdiag.size() != diag.size() - 1)
      throw InvalidSpec("tridiagonal needs m >= 1 diagonal and m-1 off-diagonal entries");
  }

  Eigen::Index size() const { return diag.size(); }

  /// Leading principal m x m block.
  TriDiag leading(Eigen::Index m) const { return TriDiag(diag.head(m), offdiag.head(m - 1)); }

  /// Same matrix with rows and columns listed in reverse order.
  TriDiag reversed() const { return TriDiag(diag.reverse(), offdiag.reverse()); }

  Scalar norm_inf() const {
    Scalar best = 0;
    const Eigen::Index m = size();
    for (Eigen::Index i = 0; i < m; ++i) {
      Scalar row = std::abs(diag[i]);
      if (i > 0) row += std::abs(offdiag[i - 1]);
      if (i + 1 < m) row += std::abs(offdiag[i]);
      best = std::max(best, row);
    }
    return best;
  }

  Matrix to_dense() const {
    Matrix out = diag.asDiagonal();
    for (Eigen::Index i = 0; i + 1 < size(); ++i) out(i, i + 1) = out(i + 1, i) = offdiag[i];
    return out;
  }

  Vector apply(const Vector& x) const {
    Vector y = diag.cwiseProduct(x);
    const Eigen::Index m = size();
    if (m > 1) {
      y.head(m - 1) += offdiag.cwiseProduct(x.tail(m - 1));
      y.tail(m - 1) += offdiag.cwiseProduct(x.head(m - 1));
    }
    return y;
  }
};

template <typename Scalar = double>
struct TriDiagEigen {
  typename TriDiag<Scalar>::Vector values;   // nondecreasing
  typename TriDiag<Scalar>::Matrix vectors;  // columns; empty unless requested
};

namespace detail {

template <typename Scalar>
Scalar sturm_pivmin(const TriDiag<Scalar>& t) {
  Scalar b2 = 1;
  for (Eigen::Index i = 0; i < t.offdiag.size(); ++i) b2 = std::max(b2, t.offdiag[i] * t.offdiag[i]);
  return std::numeric_limits<Scalar>::min() * b2;
}

template <typename Scalar>
Eigen::Index sturm_count(const TriDiag<Scalar>& t, Scalar x, Scalar pivmin) {
  Eigen::Index negative = 0;
  Scalar q = t.diag[0] - x;
  for (Eigen::Index i = 0;; ++i) {
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++negative;
    if (i + 1 == t.size()) break;
    const Scalar b = t.offdiag[i];
    q = t.diag[i + 1] - x - b * b / q;
  }
  return negative;
}

// Gaussian elimination with partial pivoting of the tridiagonal T - shift*I.
// U has two superdiagonals after row swaps.
template <typename Scalar>
struct ShiftedLU {
  using Vector = typename TriDiag<Scalar>::Vector;
  Vector d, du, du2, dl;
  std::vector<bool> swapped;

  ShiftedLU(const TriDiag<Scalar>& t, Scalar shift, Scalar tiny) {
    const Eigen::Index m = t.size();
    d = t.diag.array() - shift;
    du = t.offdiag;
    dl = t.offdiag;
    du2 = Vector::Zero(std::max<Eigen::Index>(m - 2, 0));
    swapped.assign(static_cast<std::size_t>(m), false);
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0) d[i] = tiny;
        const Scalar f = dl[i] / d[i];
        dl[i] = f;
        d[i + 1] -= f * du[i];
      } else {
        const Scalar f = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = f;
        const Scalar old = du[i];
        du[i] = d[i + 1];
        d[i + 1] = old - f * d[i + 1];
        if (i + 2 < m) {
          du2[i] = du[i + 1];
          du[i + 1] = -f * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    if (d[m - 1] == 0) d[m - 1] = tiny;
  }

  Vector solve(Vector b) const {
    const Eigen::Index m = d.size();
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      if (swapped[i]) {
        const Scalar tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    for (Eigen::Index i = m - 1; i >= 0; --i) {
      Scalar s = b[i];
      if (i + 1 < m) s -= du[i] * b[i + 1];
      if (i + 2 < m) s -= du2[i] * b[i + 2];
      b[i] = s / d[i];
    }
    return b;
  }
};

}  // namespace detail

/// Number of eigenvalues of `t` strictly below `x`, from the signs of the
/// LDL^T pivots of t - x*I.
template <typename Scalar>
Eigen::Index sturm_count(const TriDiag<Scalar>& t, Scalar x) {
  return detail::sturm_count(t, x, detail::sturm_pivmin(t));
}

/// Eigenvalues by Sturm bisection, eigenvectors (optional) by inverse
/// iteration with reorthogonalization inside close clusters.
template <typename Scalar>
TriDiagEigen<Scalar> tridiag_eigen(const TriDiag<Scalar>& t, bool want_vectors = true) {
  using Vector = typename TriDiag<Scalar>::Vector;
  const Eigen::Index m = t.size();
  if (m == 1) {
    TriDiagEigen<Scalar> out;
    out.values = t.diag;
    if (want_vectors) out.vectors = TriDiag<Scalar>::Matrix::Ones(1, 1);
    return out;
  }
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar pivmin = detail::sturm_pivmin(t);
  const Scalar norm = t.norm_inf();

  // Gershgorin enclosure, widened so the endpoints bracket strictly.
  Scalar lo = t.diag[0], hi = t.diag[0];
  for (Eigen::Index i = 0; i < m; ++i) {
    Scalar r = 0;
    if (i > 0) r += std::abs(t.offdiag[i - 1]);
    if (i + 1 < m) r += std::abs(t.offdiag[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const Scalar pad = 4 * eps * std::max(norm, Scalar(1)) + pivmin;
  lo -= pad;
  hi += pad;
  const Scalar abstol = 2 * pivmin;

  TriDiagEigen<Scalar> out;
  out.values.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    // Invariant: count(a) <= j < count(b).
    Scalar a = j > 0 ? std::max(lo, out.values[j - 1] - pad) : lo;
    Scalar b = hi;
    for (int iter = 0; iter < 256; ++iter) {
      const Scalar width = b - a;
      if (width <= abstol + 2 * eps * std::max(std::abs(a), std::abs(b))) break;
      const Scalar mid = a + width / 2;
      if (mid == a || mid == b) break;
      if (detail::sturm_count(t, mid, pivmin) > j)
        b = mid;
      else
        a = mid;
    }
    out.values[j] = a + (b - a) / 2;
  }
  if (!want_vectors) return out;

  out.vectors.resize(m, m);
  const Scalar tiny = eps * std::max(norm, Scalar(1));
  const Scalar cluster_gap = Scalar(1e-3) * std::max(norm, Scalar(1));
  Eigen::Index cluster_start = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j > 0 && out.values[j] - out.values[j - 1] > cluster_gap) cluster_start = j;
    detail::ShiftedLU<Scalar> lu(t, out.values[j], tiny);
    // Deterministic, non-degenerate start vector.
    Vector x(m);
    for (Eigen::Index i = 0; i < m; ++i) x[i] = Scalar(1) + Scalar(0.1) * static_cast<Scalar>((i * 7 + j * 3) % 11);
    x.normalize();
    for (int iter = 0; iter < 4; ++iter) {
      x = lu.solve(x);
      for (Eigen::Index p = cluster_start; p < j; ++p) x -= out.vectors.col(p).dot(x) * out.vectors.col(p);
      x.normalize();
    }
    // Sign convention: first nonzero component positive.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (x[i] != 0) {
        if (x[i] < 0) x = -x;
        break;
      }
    }
    out.vectors.col(j) = x;
  }
  return out;
}

}  // namespace stratree
