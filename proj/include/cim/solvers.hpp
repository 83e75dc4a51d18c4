#pragma once

// Fixed-point iteration driver and the solver family for best approximation
// onto intersections of affine subspaces: circumcentered reflection methods
// over the operator sets S1..S4, Douglas-Rachford, alternating projections,
// averaged projections and the product-space circumcenter method.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cim/circumcenter.hpp"
#include "cim/linalg.hpp"
#include "cim/operators.hpp"

namespace cim {

struct IterationConfig {
  double tol = 1e-6;
  std::int64_t max_iter = 1'000'000;
  bool record_trace = false;

  void validate() const {
    if (!(tol >= 0.0)) throw InputError("IterationConfig: tol must be nonnegative");
    if (max_iter < 1) throw InputError("IterationConfig: max_iter must be at least 1");
  }
};

struct Trace {
  /// Monitored points (comparable with the reference), when recorded.
  std::vector<Vector> iterates;
  /// Internal solver states, when recorded (the governed DRM sequence, the
  /// lifted product-space iterate, ...).
  std::vector<Vector> states;
  /// ‖monitored_k - reference‖ for k = 0..iterations.
  std::vector<double> errors;
  std::int64_t iterations = 0;
  bool solved = false;
  std::chrono::nanoseconds wall_time{0};
};

using StepFn = std::function<Vector(const Vector&)>;

/// Runs x_{k+1} = step(x_k) until ‖monitor(x_k) - reference‖ <= cfg.tol or
/// k reaches cfg.max_iter. Throws DivergenceError on a non-finite iterate.
inline Trace iterate(const StepFn& step, const Vector& x0, const IterationConfig& cfg, const Vector& reference,
                     const StepFn& monitor = {}) {
  cfg.validate();
  Trace trace;
  const auto observe = [&](const Vector& state) {
    Vector m = monitor ? monitor(state) : state;
    detail::require_same_dim(m.size(), reference.size(), "iterate");
    trace.errors.push_back((m - reference).norm());
    if (cfg.record_trace) {
      trace.states.push_back(state);
      trace.iterates.push_back(std::move(m));
    }
    return trace.errors.back() <= cfg.tol;
  };

  const auto start = std::chrono::steady_clock::now();
  Vector x = x0;
  bool done = observe(x);
  std::int64_t k = 0;
  while (!done && k < cfg.max_iter) {
    Vector next = step(x);
    if (!next.allFinite()) {
      throw DivergenceError("iterate: non-finite iterate at step " + std::to_string(k + 1), x, k);
    }
    x = std::move(next);
    ++k;
    done = observe(x);
  }
  trace.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  trace.iterations = k;
  trace.solved = done;
  return trace;
}

enum class SolverKind { crm_s1, crm_s2, crm_s3, crm_s4, drm, map, avg_proj, product_crm };
enum class InitTransform { none, project_u1, project_u2, project_sum };
/// Lifted operator set used by product_crm on H^t.
enum class LiftedSet { minimal /* {Id, R_C R_D} */, extended /* {Id, R_C, R_D, R_C R_D} */ };

struct SolverSpec {
  SolverKind kind = SolverKind::crm_s3;
  InitTransform init = InitTransform::none;
  LiftedSet lifted = LiftedSet::minimal;
};

inline constexpr std::string_view solver_key(SolverKind k) {
  switch (k) {
    case SolverKind::crm_s1: return "crm-s1";
    case SolverKind::crm_s2: return "crm-s2";
    case SolverKind::crm_s3: return "crm-s3";
    case SolverKind::crm_s4: return "crm-s4";
    case SolverKind::drm: return "drm";
    case SolverKind::map: return "map";
    case SolverKind::avg_proj: return "avg-proj";
    case SolverKind::product_crm: return "product-crm";
  }
  return "?";
}

inline constexpr SolverKind kAllSolverKinds[] = {SolverKind::crm_s1, SolverKind::crm_s2, SolverKind::crm_s3,
                                                 SolverKind::crm_s4, SolverKind::drm,    SolverKind::map,
                                                 SolverKind::avg_proj, SolverKind::product_crm};

inline SolverKind parse_solver_kind(std::string_view key) {
  for (SolverKind k : kAllSolverKinds) {
    if (solver_key(k) == key) return k;
  }
  throw InputError("unknown solver key '" + std::string(key) + "'");
}

struct Solver {
  std::string key;
  /// H -> state space (includes the init transform).
  StepFn init;
  /// One iteration in state space.
  StepFn step;
  /// State -> comparable point of H.
  StepFn monitored;
  /// State -> projection of the state onto the solution set as seen in state
  /// space (∩U_i in H, C ∩ D in H^t). Iterations leave it invariant.
  StepFn solution_projection;
  Index state_dim = 0;
  /// Operator set of circumcenter solvers, in state space.
  std::optional<OperatorSet> operators;
};

namespace detail {

inline std::vector<IsometryOp> reflectors(std::span<const AffineSubspace> subspaces) {
  std::vector<IsometryOp> r;
  for (const auto& u : subspaces) r.push_back(IsometryOp::reflector(u));
  return r;
}

/// Operator set of crm_s1..crm_s4 (crm_s1 takes any t >= 2).
inline std::vector<IsometryOp> crm_operator_set(SolverKind kind, std::span<const AffineSubspace> subspaces) {
  const auto r = reflectors(subspaces);
  const IsometryOp id = IsometryOp::identity();
  switch (kind) {
    case SolverKind::crm_s1: {
      std::vector<IsometryOp> s{id};
      s.insert(s.end(), r.begin(), r.end());
      return s;
    }
    case SolverKind::crm_s2: return {id, r[0], r[1] * r[0]};
    case SolverKind::crm_s3: return {id, r[0], r[1], r[1] * r[0]};
    case SolverKind::crm_s4:
      return {id, r[0], r[1], r[1] * r[0], r[0] * r[1], IsometryOp::compose({r[0], r[1], r[0]})};
    default: throw InputError("crm_operator_set: not a circumcenter solver");
  }
}

inline AffineSubspace solution_set(std::span<const AffineSubspace> subspaces) {
  auto w = intersect_all(subspaces);
  if (!w) throw InputError("solver: subspaces have empty intersection");
  return *w;
}

}  // namespace detail

/// Builds init / step / monitored maps for the named method.
inline Solver make_solver(const SolverSpec& spec, std::span<const AffineSubspace> subspaces) {
  const std::size_t t = subspaces.size();
  if (t < 2) throw InputError("make_solver: at least two subspaces are required");
  const Index n = subspaces.front().ambient_dim();
  for (const auto& u : subspaces) detail::require_same_dim(u.ambient_dim(), n, "make_solver");
  const bool pair_only = spec.kind == SolverKind::crm_s2 || spec.kind == SolverKind::crm_s3 ||
                         spec.kind == SolverKind::crm_s4 || spec.kind == SolverKind::drm;
  if (pair_only && t != 2) {
    throw InputError("make_solver: " + std::string(solver_key(spec.kind)) + " needs exactly two subspaces");
  }
  if ((spec.init == InitTransform::project_u2 || spec.init == InitTransform::project_sum) && t != 2) {
    throw InputError("make_solver: init transform needs exactly two subspaces");
  }

  const AffineSubspace w = detail::solution_set(subspaces);
  const std::vector<AffineSubspace> sets(subspaces.begin(), subspaces.end());

  StepFn pre = [](const Vector& x) { return x; };
  switch (spec.init) {
    case InitTransform::none: break;
    case InitTransform::project_u1: pre = [u = sets[0]](const Vector& x) { return u.project(x); }; break;
    case InitTransform::project_u2: pre = [u = sets[1]](const Vector& x) { return u.project(x); }; break;
    case InitTransform::project_sum: {
      // u + (L1 + L2) for any u in U1 ∩ U2.
      AffineSubspace k(w.anchor(), sum(sets[0].direction(), sets[1].direction()));
      pre = [k = std::move(k)](const Vector& x) { return k.project(x); };
      break;
    }
  }

  Solver s;
  s.key = std::string(solver_key(spec.kind));
  s.state_dim = n;
  s.init = pre;
  s.monitored = [](const Vector& x) { return x; };
  s.solution_projection = [w](const Vector& x) { return w.project(x); };

  switch (spec.kind) {
    case SolverKind::crm_s1:
    case SolverKind::crm_s2:
    case SolverKind::crm_s3:
    case SolverKind::crm_s4: {
      s.operators.emplace(detail::crm_operator_set(spec.kind, subspaces), n);
      s.step = [ops = *s.operators](const Vector& x) { return circumcenter_map(ops, x); };
      break;
    }
    case SolverKind::drm: {
      // Governed sequence of ½(Id + R_U2 R_U1); its U1-shadow is monitored.
      s.step = [u1 = sets[0], u2 = sets[1]](const Vector& x) -> Vector { return 0.5 * (x + u2.reflect(u1.reflect(x))); };
      s.monitored = [u1 = sets[0]](const Vector& x) { return u1.project(x); };
      break;
    }
    case SolverKind::map: {
      s.step = [sets](const Vector& x) {
        Vector y = x;
        for (const auto& u : sets) y = u.project(y);
        return y;
      };
      break;
    }
    case SolverKind::avg_proj: {
      s.step = [sets](const Vector& x) {
        Vector y = Vector::Zero(x.size());
        for (const auto& u : sets) y += u.project(x);
        return Vector(y / static_cast<double>(sets.size()));
      };
      break;
    }
    case SolverKind::product_crm: {
      // C = U_1 x ... x U_t, D = diagonal of H^t; iterate CC over the lifted set.
      const Index big = n * static_cast<Index>(t);
      Index cdim = 0;
      for (const auto& u : sets) cdim += u.dim();
      Matrix cbasis = Matrix::Zero(big, cdim);
      Vector canchor(big);
      Index col = 0;
      for (std::size_t i = 0; i < t; ++i) {
        const Index off = static_cast<Index>(i) * n;
        cbasis.block(off, col, n, sets[i].dim()) = sets[i].direction().basis();
        canchor.segment(off, n) = sets[i].anchor();
        col += sets[i].dim();
      }
      Matrix dbasis(big, n);
      for (std::size_t i = 0; i < t; ++i) {
        dbasis.middleRows(static_cast<Index>(i) * n, n) = Matrix::Identity(n, n) / std::sqrt(static_cast<double>(t));
      }
      const auto rc = IsometryOp::reflector(AffineSubspace(canchor, LinearSubspace::from_orthonormal(cbasis)));
      const auto rd = IsometryOp::reflector(LinearSubspace::from_orthonormal(dbasis, 1e-10));
      std::vector<IsometryOp> lifted{IsometryOp::identity()};
      if (spec.lifted == LiftedSet::extended) {
        lifted.push_back(rc);
        lifted.push_back(rd);
      }
      lifted.push_back(rc * rd);
      s.operators.emplace(std::move(lifted), big);
      s.state_dim = big;
      s.init = [pre, t](const Vector& x) {
        const Vector y = pre(x);
        return Vector(y.replicate(static_cast<Index>(t), 1));
      };
      s.step = [ops = *s.operators](const Vector& x) { return circumcenter_map(ops, x); };
      s.monitored = [n](const Vector& x) { return Vector(x.head(n)); };
      s.solution_projection = [w, n, t](const Vector& x) {
        Vector mean = Vector::Zero(n);
        for (std::size_t i = 0; i < t; ++i) mean += x.segment(static_cast<Index>(i) * n, n);
        mean /= static_cast<double>(t);
        return Vector(w.project(mean).replicate(static_cast<Index>(t), 1));
      };
      break;
    }
  }
  return s;
}

/// Runs a built solver from x0 against a reference point of H.
inline Trace solve(const Solver& solver, const Vector& x0, const IterationConfig& cfg, const Vector& reference) {
  return iterate(solver.step, solver.init(x0), cfg, reference, solver.monitored);
}

/// par U_i, after checking z ∈ ∩ U_i.
inline std::vector<LinearSubspace> parallelize(std::span<const AffineSubspace> subspaces, const Vector& z) {
  std::vector<LinearSubspace> out;
  for (const auto& u : subspaces) {
    if (!u.contains(z, 1e-9)) throw InputError("parallelize: z is not in the intersection");
    out.push_back(u.direction());
  }
  return out;
}

}  // namespace cim
