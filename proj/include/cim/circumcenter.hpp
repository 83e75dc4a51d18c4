#pragma once

// Circumcenters of finite point sets and the circumcenter mapping
// CC_S x = CC(S(x)) induced by an operator set.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cim/linalg.hpp"
#include "cim/operators.hpp"

namespace cim {

inline constexpr double kCircumcenterTol = 1e-8;
/// Differences shorter than this times the largest point norm are treated
/// as rounding noise when picking the basis.
inline constexpr double kNoiseFloor = 5e-14;

/// Nonempty finite list of points of a common dimension; duplicates allowed.
class PointSet {
 public:
  explicit PointSet(std::vector<Vector> points) : points_(std::move(points)) {
    if (points_.empty()) throw InputError("PointSet: empty");
    for (const auto& p : points_) detail::require_same_dim(p.size(), points_.front().size(), "PointSet");
  }

  const std::vector<Vector>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  Index dim() const noexcept { return points_.front().size(); }
  const Vector& operator[](std::size_t i) const { return points_[i]; }

  /// Columns p_i - p_1, i = 2..m.
  Matrix differences() const {
    Matrix d(dim(), static_cast<Index>(size()) - 1);
    for (std::size_t i = 1; i < size(); ++i) d.col(static_cast<Index>(i) - 1) = points_[i] - points_[0];
    return d;
  }

 private:
  std::vector<Vector> points_;
};

struct CircumcenterResult {
  std::optional<Vector> value;
  double radius = 0.0;
  /// max_p | ‖candidate - p‖ - radius |
  double residual = 0.0;
  /// Condition number of the Gram system (1 when no system was solved).
  double condition = 1.0;

  bool exists() const noexcept { return value.has_value(); }
};

namespace detail {

inline double max_distance_deviation(const PointSet& k, const Vector& c, double radius) {
  double dev = 0.0;
  for (const auto& p : k.points()) dev = std::max(dev, std::abs((c - p).norm() - radius));
  return dev;
}

}  // namespace detail

/// Circumcenter through the Gram-matrix formula on a maximal independent
/// subset of the differences p_i - p_1 (picked by pivoted Gram-Schmidt).
/// The candidate is accepted if every point of K lies within
/// tol * (1 + radius) of the common radius; otherwise the result is empty.
inline CircumcenterResult circumcenter_points(const PointSet& k, double tol = kCircumcenterTol,
                                              double rank_tol = kRankTol) {
  if (!(tol > 0.0)) throw InputError("circumcenter_points: tol must be positive");
  CircumcenterResult out;
  const Vector& p1 = k[0];
  if (k.size() == 1) {
    out.value = p1;
    return out;
  }

  const Matrix diffs = k.differences();
  double scale = 0.0;
  for (const auto& p : k.points()) scale = std::max(scale, p.norm());
  const PivotedBasis selection = pivoted_gram_schmidt(diffs, rank_tol, kNoiseFloor * scale);
  const Index d = static_cast<Index>(selection.pivots.size());
  Vector candidate = p1;
  if (d > 0) {
    Matrix chosen(k.dim(), d);
    for (Index j = 0; j < d; ++j) chosen.col(j) = diffs.col(selection.pivots[static_cast<std::size_t>(j)]);
    const Matrix gram = chosen.transpose() * chosen;
    const Vector rhs = 0.5 * chosen.colwise().squaredNorm().transpose();

    Vector alpha;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) {
      alpha = llt.solve(rhs);
    }
    if (llt.info() != Eigen::Success || !alpha.allFinite()) {
      alpha = gram.completeOrthogonalDecomposition().solve(rhs);
    }
    if (!alpha.allFinite()) throw NumericalError("circumcenter_points: singular Gram system");
    candidate += chosen * alpha;

    const Eigen::JacobiSVD<Matrix> svd(gram);
    const auto& s = svd.singularValues();
    out.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  }

  out.radius = (candidate - p1).norm();
  out.residual = detail::max_distance_deviation(k, candidate, out.radius);
  if (out.residual <= tol * (1.0 + out.radius)) out.value = std::move(candidate);
  return out;
}

/// Independent check of the circumcenter definition: write the candidate
/// as p_1 + B c over an SVD basis B of the difference span and solve the
/// equidistance equations ‖p - p_i‖² = ‖p - p_1‖² by least squares.
inline CircumcenterResult circumcenter_oracle(const PointSet& k) {
  constexpr double accept = 1e-8;
  CircumcenterResult out;
  const Vector& p1 = k[0];
  if (k.size() == 1) {
    out.value = p1;
    return out;
  }
  const Matrix diffs = k.differences();
  Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > kRankTol * std::max(sigma(0), 0.0)) ++rank;

  Vector candidate = p1;
  if (rank > 0) {
    const Matrix basis = svd.matrixU().leftCols(rank);
    // 2 <B c, d_i> = ‖d_i‖²  for every i
    const Matrix system = 2.0 * diffs.transpose() * basis;
    const Vector rhs = diffs.colwise().squaredNorm().transpose();
    const Vector c = system.colPivHouseholderQr().solve(rhs);
    candidate += basis * c;
  }
  out.radius = (candidate - p1).norm();
  out.residual = detail::max_distance_deviation(k, candidate, out.radius);
  if (out.residual <= accept * (1.0 + out.radius)) out.value = std::move(candidate);
  return out;
}

/// CC_S x. An empty circumcenter contradicts properness of isometry-induced
/// mappings and is reported as ProperError.
inline Vector circumcenter_map(const OperatorSet& s, const Vector& x, double tol = kCircumcenterTol) {
  const PointSet points(s.apply_all(x));
  CircumcenterResult r = circumcenter_points(points, tol);
  if (!r.value) {
    throw ProperError("circumcenter_map: properness violated numerically (residual " + std::to_string(r.residual) +
                          ", radius " + std::to_string(r.radius) + ")",
                      r.residual);
  }
  return std::move(*r.value);
}

/// aff(points) as an affine subspace.
inline AffineSubspace affine_hull(const PointSet& k, double rank_tol = kRankTol) {
  return AffineSubspace(k[0], orthonormal_basis(k.differences(), k.dim(), rank_tol));
}

/// CC_S x = P_aff(S(x)) (P_W x) for a known nonempty W ⊆ ∩ Fix T.
inline Vector circumcenter_via_fixpoint(const OperatorSet& s, const Vector& x, const AffineSubspace& w) {
  detail::require_same_dim(w.ambient_dim(), s.dim(), "circumcenter_via_fixpoint");
  // Sample W at its anchor and anchor + each basis direction.
  std::vector<Vector> samples{w.anchor()};
  for (Index j = 0; j < w.dim(); ++j) samples.push_back(w.anchor() + w.direction().basis().col(j));
  for (const auto& y : samples) {
    for (const auto& op : s.ops()) {
      if ((op.apply(y) - y).norm() > 1e-9 * (1.0 + y.norm())) {
        throw InputError("circumcenter_via_fixpoint: W is not contained in the common fixed set");
      }
    }
  }
  const PointSet points(s.apply_all(x));
  return affine_hull(points).project(w.project(x));
}

}  // namespace cim
