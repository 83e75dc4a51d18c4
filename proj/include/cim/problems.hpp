#pragma once

// Benchmark problems: pairs of linear subspaces with a prescribed Friedrichs
// angle, seeded initial points and their best approximations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cim/linalg.hpp"
#include "cim/random.hpp"

namespace cim {

/// Explicit principal angles (radians) for the non-shared directions.
struct AngleList {
  std::vector<double> angles;
};

/// Sample c_F uniformly from [lo, hi); the remaining principal angles are
/// drawn uniformly from [acos(c_F), π/2].
struct CosineRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct ProblemSpec {
  Index n = 100;
  Index p = 25;  ///< dim U1
  Index q = 25;  ///< dim U2
  Index r = 5;   ///< dim U1 ∩ U2
  std::variant<AngleList, CosineRange> angles = CosineRange{0.9, 0.95};
  Index pairs = 10;
  Index points_per_pair = 10;
  std::uint64_t seed = 0;
  double x0_norm = 10.0;

  /// p = q = max(1, n/4), r = n/20.
  static ProblemSpec with_default_dims(Index n) {
    ProblemSpec s;
    s.n = n;
    s.p = s.q = std::max<Index>(1, n / 4);
    s.r = n / 20;
    return s;
  }

  /// Number of rotated (a_i, b_i) axis pairs.
  Index rotated_pairs() const { return std::min(p, q) - r; }

  void validate() const {
    if (n <= 0) throw InputError("ProblemSpec: n must be positive");
    if (p < 0 || q < 0 || r < 0) throw InputError("ProblemSpec: negative dimension");
    if (r > std::min(p, q)) throw InputError("ProblemSpec: r must not exceed min(p, q)");
    if (p + q - r > n) throw InputError("ProblemSpec: p + q - r exceeds n");
    if (pairs < 0 || points_per_pair < 0) throw InputError("ProblemSpec: negative count");
    if (!(x0_norm > 0.0)) throw InputError("ProblemSpec: x0_norm must be positive");
    if (const auto* list = std::get_if<AngleList>(&angles)) {
      if (static_cast<Index>(list->angles.size()) != rotated_pairs()) {
        throw InputError("ProblemSpec: need exactly min(p,q) - r prescribed angles");
      }
      for (double a : list->angles) {
        if (!(a > 0.0 && a <= std::numbers::pi / 2)) throw InputError("ProblemSpec: angles must lie in (0, pi/2]");
      }
    } else {
      const auto& range = std::get<CosineRange>(angles);
      if (!(range.lo >= 0.0 && range.lo <= range.hi && range.hi < 1.0)) {
        throw InputError("ProblemSpec: cosine range must satisfy 0 <= lo <= hi < 1");
      }
      if (rotated_pairs() == 0) throw InputError("ProblemSpec: no principal angle left to control");
    }
  }
};

struct SubspacePair {
  LinearSubspace u1;
  LinearSubspace u2;
  /// c_F recomputed from the constructed subspaces.
  double cf;
  /// cos of the smallest prescribed angle.
  double requested_cf;
};

/// Builds U1 = span{shared} ⊕ span{a_i} ⊕ extras and
/// U2 = span{shared} ⊕ span{cos θ_i a_i + sin θ_i b_i} ⊕ extras on disjoint
/// coordinate axes, then rotates both by one seeded orthogonal map.
inline SubspacePair gen_subspace_pair(const ProblemSpec& spec, Index pair_index) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(pair_index), 0);
  const Index k = spec.rotated_pairs();

  std::vector<double> theta;
  if (const auto* list = std::get_if<AngleList>(&spec.angles)) {
    theta = list->angles;
  } else {
    const auto& range = std::get<CosineRange>(spec.angles);
    const double c = range.lo == range.hi ? range.lo : rng.uniform(range.lo, range.hi);
    const double smallest = std::acos(c);
    theta.push_back(smallest);
    for (Index i = 1; i < k; ++i) theta.push_back(rng.uniform(smallest, std::numbers::pi / 2));
  }
  const double smallest = theta.empty() ? std::numbers::pi / 2 : *std::min_element(theta.begin(), theta.end());

  const Index n = spec.n;
  Matrix b1 = Matrix::Zero(n, spec.p);
  Matrix b2 = Matrix::Zero(n, spec.q);
  Index axis = 0;
  for (Index i = 0; i < spec.r; ++i, ++axis) {
    b1(axis, i) = 1.0;
    b2(axis, i) = 1.0;
  }
  for (Index i = 0; i < k; ++i) {
    const Index a = axis++;
    const Index b = axis++;
    b1(a, spec.r + i) = 1.0;
    b2(a, spec.r + i) = std::cos(theta[static_cast<std::size_t>(i)]);
    b2(b, spec.r + i) = std::sin(theta[static_cast<std::size_t>(i)]);
  }
  for (Index i = spec.r + k; i < spec.p; ++i) b1(axis++, i) = 1.0;
  for (Index i = spec.r + k; i < spec.q; ++i) b2(axis++, i) = 1.0;

  const Matrix rot = random_orthogonal(n, rng);
  SubspacePair out{LinearSubspace::from_orthonormal(rot * b1), LinearSubspace::from_orthonormal(rot * b2), 0.0,
                   std::cos(smallest)};
  if (k == 0) out.requested_cf = 0.0;
  out.cf = friedrichs_cosine(out.u1, out.u2);
  return out;
}

/// P_{∩ U_i} x0.
inline Vector reference_solution(std::span<const AffineSubspace> subspaces, const Vector& x0) {
  const auto w = intersect_all(subspaces);
  if (!w) throw InputError("reference_solution: empty intersection");
  return w->project(x0);
}

/// Initial point j of pair i: a seeded Gaussian direction scaled to x0_norm.
inline Vector gen_initial_point(const ProblemSpec& spec, Index pair_index, Index point_index) {
  Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(pair_index), static_cast<std::uint64_t>(point_index) + 1);
  Vector v = rng.normal_vector(spec.n);
  return spec.x0_norm * v / v.norm();
}

struct Problem {
  std::string id;
  std::vector<AffineSubspace> subspaces;
  Vector x0;
  Vector reference;
  double cf = 0.0;
};

struct PointRecord {
  Vector x0;
  Vector reference;
};

struct PairRecord {
  std::string id;
  double cf = 0.0;
  AffineSubspace u1;
  AffineSubspace u2;
  std::vector<PointRecord> points;
};

inline constexpr int kProblemSetVersion = 1;

struct ProblemSet {
  int version = kProblemSetVersion;
  std::uint64_t seed = 0;
  Index n = 0;
  std::vector<PairRecord> pairs;

  static std::string point_id(const std::string& pair_id, std::size_t j) {
    const std::string num = std::to_string(j);
    return pair_id + "-x" + std::string(num.size() < 2 ? 2 - num.size() : 0, '0') + num;
  }

  std::vector<Problem> problems() const {
    std::vector<Problem> out;
    for (const auto& pr : pairs) {
      for (std::size_t j = 0; j < pr.points.size(); ++j) {
        out.push_back({point_id(pr.id, j), {pr.u1, pr.u2}, pr.points[j].x0, pr.points[j].reference, pr.cf});
      }
    }
    return out;
  }

  std::size_t problem_count() const {
    std::size_t c = 0;
    for (const auto& pr : pairs) c += pr.points.size();
    return c;
  }

  Problem find(const std::string& problem_id) const {
    for (const auto& pr : pairs) {
      for (std::size_t j = 0; j < pr.points.size(); ++j) {
        if (point_id(pr.id, j) == problem_id) {
          return {problem_id, {pr.u1, pr.u2}, pr.points[j].x0, pr.points[j].reference, pr.cf};
        }
      }
    }
    throw InputError("problem '" + problem_id + "' not found");
  }
};

inline std::string pair_id(Index i) {
  const std::string num = std::to_string(i);
  return "pair" + std::string(num.size() < 3 ? 3 - num.size() : 0, '0') + num;
}

inline ProblemSet generate_problem_set(const ProblemSpec& spec) {
  spec.validate();
  ProblemSet set;
  set.seed = spec.seed;
  set.n = spec.n;
  for (Index i = 0; i < spec.pairs; ++i) {
    SubspacePair sp = gen_subspace_pair(spec, i);
    PairRecord rec{pair_id(i), sp.cf, AffineSubspace(std::move(sp.u1)), AffineSubspace(std::move(sp.u2)), {}};
    const LinearSubspace w = intersect(rec.u1.direction(), rec.u2.direction());
    for (Index j = 0; j < spec.points_per_pair; ++j) {
      Vector x0 = gen_initial_point(spec, i, j);
      Vector ref = w.project(x0);
      rec.points.push_back({std::move(x0), std::move(ref)});
    }
    set.pairs.push_back(std::move(rec));
  }
  return set;
}

}  // namespace cim
