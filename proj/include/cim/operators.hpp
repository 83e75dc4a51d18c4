#pragma once

// Isometries of R^n (identity, reflectors, translations, orthogonal maps and
// their finite compositions), affine combinations of them, and the tools
// built on their affine decomposition x -> M x + b: fixed sets, the
// Douglas-Rachford operator, and operator-norm rate bounds.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cim/linalg.hpp"

namespace cim {

/// x -> linear * x + offset.
struct AffineMap {
  Matrix linear;
  Vector offset;

  Vector operator()(const Vector& x) const { return linear * x + offset; }
  bool is_linear(double tol = 1e-12) const { return offset.norm() <= tol * (1.0 + linear.norm()); }
};

class IsometryOp {
 public:
  struct Identity {};
  struct Reflector {
    AffineSubspace subspace;
  };
  struct Translation {
    Vector shift;
  };
  struct OrthogonalLinear {
    Matrix q;
  };
  /// Applied right-to-left: ops.back() acts first.
  struct Compose {
    std::vector<IsometryOp> ops;
  };
  using Variant = std::variant<Identity, Reflector, Translation, OrthogonalLinear, Compose>;

  static IsometryOp identity() { return IsometryOp(Identity{}); }
  static IsometryOp reflector(AffineSubspace s) { return IsometryOp(Reflector{std::move(s)}); }
  static IsometryOp reflector(LinearSubspace s) { return reflector(AffineSubspace(std::move(s))); }
  static IsometryOp translation(Vector a) {
    if (!a.allFinite()) throw InputError("translation: non-finite shift");
    return IsometryOp(Translation{std::move(a)});
  }
  static IsometryOp orthogonal(Matrix q, double tol = 1e-10) {
    if (q.rows() != q.cols() || q.rows() == 0) throw InputError("orthogonal: matrix must be square");
    if (detail::orthonormality_defect(q) > tol) throw InputError("orthogonal: Q^T Q != I");
    return IsometryOp(OrthogonalLinear{std::move(q)});
  }
  static IsometryOp compose(std::vector<IsometryOp> ops) {
    if (ops.empty()) return identity();
    if (ops.size() == 1) return std::move(ops.front());
    return IsometryOp(Compose{std::move(ops)});
  }

  const Variant& variant() const noexcept { return v_; }

  bool is_identity() const { return std::holds_alternative<Identity>(v_); }
  const Reflector* as_reflector() const { return std::get_if<Reflector>(&v_); }

  Vector apply(const Vector& x) const {
    return std::visit(
        [&](const auto& op) -> Vector {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, Identity>) {
            return x;
          } else if constexpr (std::is_same_v<T, Reflector>) {
            return op.subspace.reflect(x);
          } else if constexpr (std::is_same_v<T, Translation>) {
            detail::require_same_dim(x.size(), op.shift.size(), "Translation::apply");
            return x + op.shift;
          } else if constexpr (std::is_same_v<T, OrthogonalLinear>) {
            detail::require_same_dim(x.size(), op.q.cols(), "OrthogonalLinear::apply");
            return op.q * x;
          } else {
            Vector y = x;
            for (auto it = op.ops.rbegin(); it != op.ops.rend(); ++it) y = it->apply(y);
            return y;
          }
        },
        v_);
  }

  Vector operator()(const Vector& x) const { return apply(x); }

  /// Dense (M, b) with T x = M x + b on R^dim.
  AffineMap affine_map(Index dim) const {
    return std::visit(
        [&](const auto& op) -> AffineMap {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, Identity>) {
            return {Matrix::Identity(dim, dim), Vector::Zero(dim)};
          } else if constexpr (std::is_same_v<T, Reflector>) {
            detail::require_same_dim(op.subspace.ambient_dim(), dim, "Reflector::affine_map");
            // Canonical anchor is orthogonal to the direction, so R x = (2P - I) x + 2a.
            return {2.0 * op.subspace.direction().projector() - Matrix::Identity(dim, dim),
                    2.0 * op.subspace.anchor()};
          } else if constexpr (std::is_same_v<T, Translation>) {
            detail::require_same_dim(op.shift.size(), dim, "Translation::affine_map");
            return {Matrix::Identity(dim, dim), op.shift};
          } else if constexpr (std::is_same_v<T, OrthogonalLinear>) {
            detail::require_same_dim(op.q.rows(), dim, "OrthogonalLinear::affine_map");
            return {op.q, Vector::Zero(dim)};
          } else {
            AffineMap acc{Matrix::Identity(dim, dim), Vector::Zero(dim)};
            for (auto it = op.ops.rbegin(); it != op.ops.rend(); ++it) {
              const AffineMap m = it->affine_map(dim);
              acc = {m.linear * acc.linear, m.linear * acc.offset + m.offset};
            }
            return acc;
          }
        },
        v_);
  }

  /// Visits every reflector appearing anywhere in the expression; returns
  /// false if a non-reflector, non-identity factor is present.
  bool collect_reflector_subspaces(std::vector<AffineSubspace>& out) const {
    return std::visit(
        [&](const auto& op) -> bool {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, Identity>) {
            return true;
          } else if constexpr (std::is_same_v<T, Reflector>) {
            out.push_back(op.subspace);
            return true;
          } else if constexpr (std::is_same_v<T, Compose>) {
            bool ok = true;
            for (const auto& f : op.ops) ok = f.collect_reflector_subspaces(out) && ok;
            return ok;
          } else {
            return false;
          }
        },
        v_);
  }

 private:
  explicit IsometryOp(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

inline Vector apply(const IsometryOp& op, const Vector& x) { return op.apply(x); }

/// Composition helper: (a * b)(x) = a(b(x)).
inline IsometryOp operator*(const IsometryOp& a, const IsometryOp& b) { return IsometryOp::compose({a, b}); }

/// Element of aff(S): sum_i c_i T_i with sum_i c_i = 1.
class AffineCombo {
 public:
  struct Term {
    double coefficient;
    std::variant<IsometryOp, std::shared_ptr<const AffineCombo>> op;
  };

  explicit AffineCombo(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InputError("AffineCombo: no terms");
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient;
    if (std::abs(s - 1.0) > 1e-12) throw InputError("AffineCombo: coefficients must sum to 1");
  }

  static AffineCombo of(IsometryOp op) { return AffineCombo({{1.0, std::move(op)}}); }

  const std::vector<Term>& terms() const noexcept { return terms_; }

  double coefficient_sum() const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient;
    return s;
  }

  Vector apply(const Vector& x) const {
    Vector y = Vector::Zero(x.size());
    for (const auto& t : terms_) y += t.coefficient * apply_term(t, x);
    return y;
  }

  Vector operator()(const Vector& x) const { return apply(x); }

  AffineMap affine_map(Index dim) const {
    AffineMap acc{Matrix::Zero(dim, dim), Vector::Zero(dim)};
    for (const auto& t : terms_) {
      const AffineMap m = std::visit([&](const auto& op) { return deref(op).affine_map(dim); }, t.op);
      acc.linear += t.coefficient * m.linear;
      acc.offset += t.coefficient * m.offset;
    }
    return acc;
  }

 private:
  static const IsometryOp& deref(const IsometryOp& op) { return op; }
  static const AffineCombo& deref(const std::shared_ptr<const AffineCombo>& op) { return *op; }

  static Vector apply_term(const Term& t, const Vector& x) {
    return std::visit([&](const auto& op) { return deref(op).apply(x); }, t.op);
  }

  std::vector<Term> terms_;
};

inline Vector apply(const AffineCombo& op, const Vector& x) { return op.apply(x); }

/// Solution set of (M - I) x = -b, or nullopt when inconsistent.
inline std::optional<AffineSubspace> fixed_subspace(const AffineMap& map, double rank_tol = kRankTol) {
  const Index n = map.linear.rows();
  const Matrix a = map.linear - Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = rank_tol * std::max(1.0, sigma.size() > 0 ? sigma(0) : 0.0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  // Minimum-norm least-squares solution over the numerically nonzero part.
  Vector x = Vector::Zero(n);
  const Vector ub = svd.matrixU().transpose() * (-map.offset);
  for (Index i = 0; i < rank; ++i) x += (ub(i) / sigma(i)) * svd.matrixV().col(i);
  if ((a * x + map.offset).norm() > 1e-9 * (1.0 + map.offset.norm())) return std::nullopt;

  const Matrix null = svd.matrixV().rightCols(n - rank);
  return AffineSubspace(x, LinearSubspace::from_orthonormal(null, 1e-10));
}

/// Fix T. Reflectors return their subspace exactly.
inline std::optional<AffineSubspace> fixed_subspace(const IsometryOp& op, Index dim, double rank_tol = kRankTol) {
  if (const auto* r = op.as_reflector()) return r->subspace;
  if (op.is_identity()) return AffineSubspace(LinearSubspace::full(dim));
  return fixed_subspace(op.affine_map(dim), rank_tol);
}

inline std::optional<AffineSubspace> fixed_subspace(const AffineCombo& op, Index dim, double rank_tol = kRankTol) {
  return fixed_subspace(op.affine_map(dim), rank_tol);
}

/// T = ½ Id + ½ R_V R_U; requires U ∩ V ≠ ∅.
inline AffineCombo dr_operator(const AffineSubspace& u, const AffineSubspace& v) {
  if (!intersect(u, v)) throw InputError("dr_operator: U and V do not intersect");
  return AffineCombo({{0.5, IsometryOp::identity()},
                      {0.5, IsometryOp::compose({IsometryOp::reflector(v), IsometryOp::reflector(u)})}});
}

enum class SurrogateKind {
  mean_proj,     ///< (1/t) sum P_Li
  half_id_proj,  ///< (1/t) sum ½(Id + P_Li)
  bcs_chain,     ///< (1/t) sum T_i, T_1 = ½(Id + P_L1), T_i = ½(Id + P_Li R_L(i-1) ... R_L1)
};

/// Averaged surrogate operator written over {Id, reflectors, reflector chains}.
inline AffineCombo surrogate_ts(SurrogateKind kind, std::span<const LinearSubspace> subspaces) {
  if (subspaces.empty()) throw InputError("surrogate_ts: empty subspace list");
  const Index n = subspaces.front().ambient_dim();
  for (const auto& l : subspaces) detail::require_same_dim(l.ambient_dim(), n, "surrogate_ts");
  const double t = static_cast<double>(subspaces.size());
  std::vector<AffineCombo::Term> terms;
  switch (kind) {
    case SurrogateKind::mean_proj:
      // P_L = ½ Id + ½ R_L
      terms.push_back({0.5, IsometryOp::identity()});
      for (const auto& l : subspaces) terms.push_back({0.5 / t, IsometryOp::reflector(l)});
      break;
    case SurrogateKind::half_id_proj:
      // ½(Id + P_L) = ¾ Id + ¼ R_L
      terms.push_back({0.75, IsometryOp::identity()});
      for (const auto& l : subspaces) terms.push_back({0.25 / t, IsometryOp::reflector(l)});
      break;
    case SurrogateKind::bcs_chain: {
      // ½(Id + P_Li C) = ½ Id + ¼ R_Li C + ¼ C, with C = R_L(i-1) ... R_L1
      std::vector<IsometryOp> chain;  // R_L(i-1), ..., R_L1 (leftmost applied last)
      for (std::size_t i = 0; i < subspaces.size(); ++i) {
        const IsometryOp previous = IsometryOp::compose(chain);
        std::vector<IsometryOp> extended{IsometryOp::reflector(subspaces[i])};
        extended.insert(extended.end(), chain.begin(), chain.end());
        terms.push_back({0.5 / t, IsometryOp::identity()});
        terms.push_back({0.25 / t, IsometryOp::compose(extended)});
        terms.push_back({0.25 / t, previous});
        chain = std::move(extended);
      }
      break;
    }
  }
  return AffineCombo(std::move(terms));
}

/// ‖T P_{F⊥}‖ as the largest singular value of the dense composition.
inline double rate_bound(const AffineCombo& t, const LinearSubspace& fix) {
  const Index n = fix.ambient_dim();
  const AffineMap m = t.affine_map(n);
  if (!m.is_linear()) throw InputError("rate_bound: operator has a nonzero offset");
  const Matrix composed = m.linear * (Matrix::Identity(n, n) - fix.projector());
  Eigen::JacobiSVD<Matrix> svd(composed);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

/// Ordered operator set S = {T_1, ..., T_m} on R^n with ∩ Fix T_j ≠ ∅.
class OperatorSet {
 public:
  OperatorSet(std::vector<IsometryOp> ops, Index dim) : ops_(std::move(ops)), dim_(dim) {
    if (ops_.empty()) throw InputError("OperatorSet: empty");
    if (dim <= 0) throw InputError("OperatorSet: dimension must be positive");
    if (!has_common_fixed_point()) throw InputError("OperatorSet: operators have no common fixed point");
  }

  const std::vector<IsometryOp>& ops() const noexcept { return ops_; }
  Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ops_.size(); }

  /// S(x) = {T_1 x, ..., T_m x}.
  std::vector<Vector> apply_all(const Vector& x) const {
    detail::require_same_dim(x.size(), dim_, "OperatorSet::apply_all");
    std::vector<Vector> out;
    out.reserve(ops_.size());
    for (const auto& op : ops_) out.push_back(op.apply(x));
    return out;
  }

 private:
  bool has_common_fixed_point() const {
    // Sets built only from reflectors fix the intersection of all reflected subspaces.
    std::vector<AffineSubspace> reflected;
    bool reflector_only = true;
    for (const auto& op : ops_) reflector_only = op.collect_reflector_subspaces(reflected) && reflector_only;
    if (reflector_only) {
      if (reflected.empty() || intersect_all(reflected)) return true;
    }
    return common_fixed_set_impl().has_value();
  }

  std::optional<AffineSubspace> common_fixed_set_impl() const {
    std::optional<AffineSubspace> acc;
    for (const auto& op : ops_) {
      auto f = fixed_subspace(op, dim_);
      if (!f) return std::nullopt;
      acc = acc ? intersect(*acc, *f) : f;
      if (!acc) return std::nullopt;
    }
    return acc;
  }

  friend std::optional<AffineSubspace> common_fixed_set(const OperatorSet& s);

  std::vector<IsometryOp> ops_;
  Index dim_;
};

/// ∩ Fix T_j computed from the affine decomposition of every operator.
inline std::optional<AffineSubspace> common_fixed_set(const OperatorSet& s) { return s.common_fixed_set_impl(); }

}  // namespace cim
