// Two planes in R^3 meeting in a line; compare CRM, DRM and MAP from one point.

#include <iostream>

#include "cim/cim.hpp"

int main() {
  using namespace cim;
  Matrix b1(3, 2), b2(3, 2);
  b1 << 1, 0, 0, 1, 0, 0;
  const double c = 0.9, s = std::sqrt(1 - c * c);
  b2 << 1, 0, 0, c, 0, s;
  const AffineSubspace subspaces[] = {AffineSubspace(LinearSubspace::from_orthonormal(b1)),
                                      AffineSubspace(LinearSubspace::from_orthonormal(b2))};
  const Vector x0 = Vector::Constant(3, 1.0);
  const Vector ref = reference_solution(subspaces, x0);
  std::cout << "c_F = " << friedrichs_cosine(subspaces[0].direction(), subspaces[1].direction()) << "\n";

  IterationConfig cfg;
  cfg.tol = 1e-10;
  for (SolverKind k : {SolverKind::crm_s2, SolverKind::crm_s3, SolverKind::drm, SolverKind::map}) {
    const Trace t = solve(make_solver({k}, subspaces), x0, cfg, ref);
    std::cout << solver_key(k) << ": " << t.iterations << " iterations, error " << t.errors.back() << "\n";
  }
}
