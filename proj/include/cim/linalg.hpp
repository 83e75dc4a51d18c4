#pragma once

// Dense real vectors, linear and affine subspaces of R^n, and the
// projection / reflection / intersection / angle operations on them.
//
// Subspaces are stored as orthonormal bases (columns of a matrix). Affine
// subspaces carry a canonical anchor: the minimum-norm point of the set, so
// the anchor is orthogonal to the direction space.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cim/error.hpp"

namespace cim {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative rank tolerance shared by every rank decision in the library.
inline constexpr double kRankTol = 1e-10;
/// Orthonormality tolerance for stored bases.
inline constexpr double kOrthonormalTol = 1e-12;

namespace detail {

inline void require_same_dim(Index a, Index b, const char* where) {
  if (a != b) {
    throw InputError(std::string(where) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

inline double orthonormality_defect(const Matrix& basis) {
  if (basis.cols() == 0) return 0.0;
  const Matrix gram = basis.transpose() * basis;
  return (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Columns selected by pivoted Gram-Schmidt together with the orthonormal
/// vectors they produced. `pivots[j]` is the input column behind `q.col(j)`.
struct PivotedBasis {
  Matrix q;
  std::vector<Index> pivots;
};

/// Modified Gram-Schmidt with column pivoting on the largest residual norm
/// (ties go to the lowest index) and one re-orthogonalization pass. Columns
/// whose residual falls to rank_tol * (largest input column norm) or below,
/// or to abs_floor or below, are dropped.
inline PivotedBasis pivoted_gram_schmidt(const Matrix& columns, double rank_tol = kRankTol, double abs_floor = 0.0) {
  if (!(rank_tol > 0.0)) throw InputError("pivoted_gram_schmidt: rank_tol must be positive");
  const Index n = columns.rows();
  const Index m = columns.cols();
  PivotedBasis out;
  out.q.resize(n, 0);
  if (m == 0) return out;

  double max_norm = 0.0;
  for (Index j = 0; j < m; ++j) max_norm = std::max(max_norm, columns.col(j).norm());
  if (max_norm == 0.0) return out;
  const double threshold = std::max(rank_tol * max_norm, abs_floor);

  Matrix residual = columns;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  Matrix q(n, std::min(n, m));
  Index rank = 0;
  while (rank < std::min(n, m)) {
    Index best = -1;
    double best_norm = threshold;
    for (Index j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double r = residual.col(j).norm();
      if (r > best_norm) {
        best_norm = r;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;

    Vector v = residual.col(best) / best_norm;
    if (rank > 0) {
      const auto prev = q.leftCols(rank);
      v -= prev * (prev.transpose() * v);
      v.normalize();
    }
    q.col(rank) = v;
    out.pivots.push_back(best);
    ++rank;
    for (Index j = 0; j < m; ++j) {
      if (!used[static_cast<std::size_t>(j)]) residual.col(j) -= v * v.dot(residual.col(j));
    }
  }
  out.q = q.leftCols(rank);
  return out;
}

/// Linear subspace of R^n given by an orthonormal basis (possibly empty).
class LinearSubspace {
 public:
  /// The zero subspace of R^n.
  explicit LinearSubspace(Index ambient_dim) : n_(ambient_dim), basis_(ambient_dim, 0) {
    if (ambient_dim <= 0) throw InputError("LinearSubspace: ambient dimension must be positive");
  }

  /// Wraps an already orthonormal basis; throws if it is not orthonormal.
  static LinearSubspace from_orthonormal(Matrix basis, double tol = kOrthonormalTol) {
    if (basis.rows() <= 0) throw InputError("LinearSubspace: ambient dimension must be positive");
    if (basis.cols() > basis.rows()) throw InputError("LinearSubspace: more basis vectors than ambient dimension");
    if (!basis.allFinite()) throw InputError("LinearSubspace: non-finite basis entry");
    if (detail::orthonormality_defect(basis) > tol) throw InputError("LinearSubspace: basis is not orthonormal");
    LinearSubspace s(basis.rows());
    s.basis_ = std::move(basis);
    return s;
  }

  static LinearSubspace full(Index n) { return from_orthonormal(Matrix::Identity(n, n)); }

  Index ambient_dim() const noexcept { return n_; }
  Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  Vector project(const Vector& x) const {
    detail::require_same_dim(x.size(), n_, "LinearSubspace::project");
    if (dim() == 0) return Vector::Zero(n_);
    return basis_ * (basis_.transpose() * x);
  }

  /// Dense projector B B^T.
  Matrix projector() const { return basis_ * basis_.transpose(); }

  bool contains(const Vector& x, double tol = 1e-9) const {
    return (x - project(x)).norm() <= tol * (1.0 + x.norm());
  }

 private:
  Index n_;
  Matrix basis_;
};

/// Orthonormal basis of span(vectors); see pivoted_gram_schmidt.
inline LinearSubspace orthonormal_basis(const Matrix& columns, Index ambient_dim, double rank_tol = kRankTol) {
  detail::require_same_dim(columns.rows(), ambient_dim, "orthonormal_basis");
  return LinearSubspace::from_orthonormal(pivoted_gram_schmidt(columns, rank_tol).q, 1e-10);
}

inline LinearSubspace orthonormal_basis(std::span<const Vector> vectors, Index ambient_dim,
                                        double rank_tol = kRankTol) {
  Matrix cols(ambient_dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    detail::require_same_dim(vectors[j].size(), ambient_dim, "orthonormal_basis");
    cols.col(static_cast<Index>(j)) = vectors[j];
  }
  return orthonormal_basis(cols, ambient_dim, rank_tol);
}

/// Closed affine subspace anchor + direction with a minimum-norm anchor.
class AffineSubspace {
 public:
  AffineSubspace(const Vector& point, LinearSubspace direction) : anchor_(point), direction_(std::move(direction)) {
    detail::require_same_dim(point.size(), direction_.ambient_dim(), "AffineSubspace");
    if (!point.allFinite()) throw InputError("AffineSubspace: non-finite anchor");
    anchor_ = point - direction_.project(point);
  }

  explicit AffineSubspace(LinearSubspace direction)
      : anchor_(Vector::Zero(direction.ambient_dim())), direction_(std::move(direction)) {}

  Index ambient_dim() const noexcept { return direction_.ambient_dim(); }
  Index dim() const noexcept { return direction_.dim(); }
  const Vector& anchor() const noexcept { return anchor_; }
  const LinearSubspace& direction() const noexcept { return direction_; }
  bool is_linear() const { return anchor_.norm() == 0.0; }

  Vector project(const Vector& x) const {
    detail::require_same_dim(x.size(), ambient_dim(), "project");
    return anchor_ + direction_.project(x - anchor_);
  }

  Vector reflect(const Vector& x) const { return 2.0 * project(x) - x; }

  double distance(const Vector& x) const { return (x - project(x)).norm(); }

  bool contains(const Vector& x, double tol = 1e-9) const { return distance(x) <= tol * (1.0 + x.norm()); }

 private:
  Vector anchor_;
  LinearSubspace direction_;
};

inline Vector project(const AffineSubspace& s, const Vector& x) { return s.project(x); }
inline Vector project(const LinearSubspace& s, const Vector& x) { return s.project(x); }
inline Vector reflect(const AffineSubspace& s, const Vector& x) { return s.reflect(x); }
inline Vector reflect(const LinearSubspace& s, const Vector& x) { return 2.0 * s.project(x) - x; }

/// L^perp, built from the trailing columns of a full Householder Q.
inline LinearSubspace orthogonal_complement(const LinearSubspace& l) {
  const Index n = l.ambient_dim();
  const Index k = l.dim();
  if (k == 0) return LinearSubspace::full(n);
  if (k == n) return LinearSubspace(n);
  Eigen::HouseholderQR<Matrix> qr(l.basis());
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return LinearSubspace::from_orthonormal(q.rightCols(n - k));
}

/// U ∩ V as the nullspace of the stacked system [I - P_U; I - P_V].
inline LinearSubspace intersect(const LinearSubspace& u, const LinearSubspace& v, double rank_tol = kRankTol) {
  detail::require_same_dim(u.ambient_dim(), v.ambient_dim(), "intersect");
  const Index n = u.ambient_dim();
  if (u.dim() == 0 || v.dim() == 0) return LinearSubspace(n);
  Matrix stacked(2 * n, n);
  stacked.topRows(n) = Matrix::Identity(n, n) - u.projector();
  stacked.bottomRows(n) = Matrix::Identity(n, n) - v.projector();
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > rank_tol) ++rank;
  }
  const Index null_dim = std::min(n - rank, std::min(u.dim(), v.dim()));
  if (null_dim == 0) return LinearSubspace(n);
  // Re-orthonormalize after projecting onto U to strip the residual V^perp part.
  Matrix null = svd.matrixV().rightCols(null_dim);
  null = u.basis() * (u.basis().transpose() * null);
  return orthonormal_basis(null, n, rank_tol);
}

/// A ∩ B, or nullopt when the affine subspaces are disjoint.
inline std::optional<AffineSubspace> intersect(const AffineSubspace& a, const AffineSubspace& b,
                                               double rank_tol = kRankTol) {
  detail::require_same_dim(a.ambient_dim(), b.ambient_dim(), "intersect");
  const Index n = a.ambient_dim();
  LinearSubspace dir = intersect(a.direction(), b.direction(), rank_tol);

  // Solve a + B_a s = b + B_b t in the least-squares sense.
  const Vector rhs = b.anchor() - a.anchor();
  Vector point = a.anchor();
  const Index ka = a.dim();
  const Index kb = b.dim();
  if (ka + kb > 0) {
    Matrix system(n, ka + kb);
    system.leftCols(ka) = a.direction().basis();
    system.rightCols(kb) = -b.direction().basis();
    const Vector st = system.completeOrthogonalDecomposition().solve(rhs);
    const double resid = (system * st - rhs).norm();
    if (resid > 1e-9 * (1.0 + a.anchor().norm() + b.anchor().norm())) return std::nullopt;
    point = a.anchor() + a.direction().basis() * st.head(ka);
  } else if (rhs.norm() > 1e-9 * (1.0 + a.anchor().norm() + b.anchor().norm())) {
    return std::nullopt;
  }
  return AffineSubspace(point, std::move(dir));
}

/// Intersection of a nonempty family; nullopt when empty.
inline std::optional<AffineSubspace> intersect_all(std::span<const AffineSubspace> sets, double rank_tol = kRankTol) {
  if (sets.empty()) throw InputError("intersect_all: empty family");
  std::optional<AffineSubspace> acc = sets.front();
  for (std::size_t i = 1; i < sets.size() && acc; ++i) acc = intersect(*acc, sets[i], rank_tol);
  return acc;
}

/// Orthonormal basis of U ∩ W^perp, i.e. U with the part W removed (W ⊆ U).
inline LinearSubspace deflate(const LinearSubspace& u, const LinearSubspace& w, double rank_tol = kRankTol) {
  if (w.dim() == 0 || u.dim() == 0) return u;
  const Matrix residual = u.basis() - w.basis() * (w.basis().transpose() * u.basis());
  return orthonormal_basis(residual, u.ambient_dim(), rank_tol);
}

/// Cosines of the principal angles between U and V, descending.
inline Vector principal_cosines(const LinearSubspace& u, const LinearSubspace& v) {
  detail::require_same_dim(u.ambient_dim(), v.ambient_dim(), "principal_cosines");
  if (u.dim() == 0 || v.dim() == 0) return Vector(0);
  const Matrix cross = u.basis().transpose() * v.basis();
  Eigen::JacobiSVD<Matrix> svd(cross);
  return svd.singularValues().cwiseMin(1.0);
}

/// Cosine of the Friedrichs angle c(U,V): the largest principal cosine
/// after removing U ∩ V from both subspaces. Nested subspaces (empty
/// supremum) give 0.
inline double friedrichs_cosine(const LinearSubspace& u, const LinearSubspace& v, double rank_tol = kRankTol) {
  detail::require_same_dim(u.ambient_dim(), v.ambient_dim(), "friedrichs_cosine");
  const LinearSubspace w = intersect(u, v, rank_tol);
  const LinearSubspace ud = deflate(u, w, rank_tol);
  const LinearSubspace vd = deflate(v, w, rank_tol);
  const Vector c = principal_cosines(ud, vd);
  if (c.size() == 0) return 0.0;
  return std::clamp(c(0), 0.0, 1.0);
}

/// Sum U + V of two linear subspaces.
inline LinearSubspace sum(const LinearSubspace& u, const LinearSubspace& v, double rank_tol = kRankTol) {
  detail::require_same_dim(u.ambient_dim(), v.ambient_dim(), "sum");
  Matrix cols(u.ambient_dim(), u.dim() + v.dim());
  cols << u.basis(), v.basis();
  return orthonormal_basis(cols, u.ambient_dim(), rank_tol);
}

/// True when U and V span the same space.
inline bool same_span(const LinearSubspace& u, const LinearSubspace& v, double tol = 1e-9) {
  if (u.ambient_dim() != v.ambient_dim() || u.dim() != v.dim()) return false;
  if (u.dim() == 0) return true;
  return (u.projector() - v.projector()).norm() <= tol;
}

}  // namespace cim
