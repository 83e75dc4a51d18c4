#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "cim/cim.hpp"

namespace cim::test {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline LinearSubspace span_of(std::initializer_list<Vector> vs) {
  const Index n = vs.begin()->size();
  Matrix m(n, static_cast<Index>(vs.size()));
  Index j = 0;
  for (const auto& v : vs) m.col(j++) = v;
  return orthonormal_basis(m, n);
}

/// Line through the origin of R^2 at angle theta.
inline LinearSubspace planar_line(double theta) { return span_of({vec({std::cos(theta), std::sin(theta)})}); }

/// Random linear pair with Friedrichs cosine exactly cf (up to rounding).
inline SubspacePair pair_with_cf(Index n, Index p, Index q, Index r, double cf, std::uint64_t seed) {
  ProblemSpec spec;
  spec.n = n;
  spec.p = p;
  spec.q = q;
  spec.r = r;
  spec.angles = CosineRange{cf, cf};
  spec.seed = seed;
  return gen_subspace_pair(spec, 0);
}

/// Family of t random subspaces of R^n sharing a common part of dimension r;
/// each adds `extra` random directions.
inline std::vector<AffineSubspace> family_with_common(Index n, Index t, Index r, Index extra, Rng& rng) {
  const Matrix common = rng.normal_matrix(n, r);
  std::vector<AffineSubspace> out;
  for (Index i = 0; i < t; ++i) {
    Matrix cols(n, r + extra);
    cols << common, rng.normal_matrix(n, extra);
    out.emplace_back(orthonormal_basis(cols, n));
  }
  return out;
}

/// Random affine subspace through a given point.
inline AffineSubspace affine_through(const Vector& z, Index k, Rng& rng) {
  return AffineSubspace(z, random_subspace(z.size(), k, rng));
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace cim::test
