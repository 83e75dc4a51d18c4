#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "support.hpp"

using namespace cim;
using cim::test::vec;

namespace {

/// Iteration matrix from a table; negative entries are unsolved.
PerformanceMatrix table(const std::vector<std::vector<int>>& rows) {
  PerformanceMatrix m;
  for (std::size_t s = 0; s < rows.front().size(); ++s) m.solvers.push_back("s" + std::to_string(s));
  for (std::size_t p = 0; p < rows.size(); ++p) {
    m.problems.push_back("p" + std::to_string(p));
    for (std::size_t s = 0; s < rows[p].size(); ++s) {
      const int v = rows[p][s];
      m.cells.push_back({m.problems.back(), m.solvers[s], v < 0 ? 1000 : v, std::nullopt, v >= 0, {}});
    }
  }
  return m;
}

double rho_at(const ProfileCurve& c, double tau) {
  double r = 0.0;
  for (const auto& [t, v] : c.breakpoints)
    if (t <= tau) r = v;
  return r;
}

Problem make_problem(std::vector<AffineSubspace> subspaces, Vector x0) {
  Problem p;
  p.id = "p";
  p.reference = reference_solution(subspaces, x0);
  p.subspaces = std::move(subspaces);
  p.x0 = std::move(x0);
  return p;
}

ProblemSet small_set() {
  ProblemSpec s = ProblemSpec::with_default_dims(20);
  s.angles = CosineRange{0.3, 0.8};
  s.pairs = 3;
  s.points_per_pair = 3;
  s.seed = 17;
  return generate_problem_set(s);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cim_bench_" + name)).string();
}

}  // namespace

TEST(Measure, CrmS3OnPerpendicularLines) {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = make_problem({AffineSubspace(test::planar_line(0)), AffineSubspace(test::planar_line(std::numbers::pi / 2))},
                                rng.normal_vector(2));
    const auto cell = measure(p, SolverSpec{SolverKind::crm_s3}, {}, MeasureKind::iterations);
    EXPECT_TRUE(cell.solved);
    EXPECT_LE(cell.iterations, 2);
  }
}

TEST(Measure, MapOnIdenticalSubspaces) {
  Rng rng(72);
  const auto l = random_subspace(5, 2, rng);
  const auto p = make_problem({AffineSubspace(l), AffineSubspace(l)}, rng.normal_vector(5));
  const auto cell = measure(p, SolverSpec{SolverKind::map}, {}, MeasureKind::iterations);
  EXPECT_TRUE(cell.solved);
  EXPECT_EQ(cell.iterations, 1);
}

TEST(Measure, CapReachedIsUnsolved) {
  const auto pr = test::pair_with_cf(10, 3, 3, 1, 0.8, 1);
  const auto p = make_problem({AffineSubspace(pr.u1), AffineSubspace(pr.u2)}, Vector::Constant(10, 1.0));
  IterationConfig cfg;
  cfg.tol = 0.0;
  cfg.max_iter = 1;
  for (SolverKind k : kAllSolverKinds) {
    const auto cell = measure(p, SolverSpec{k}, cfg, MeasureKind::iterations);
    EXPECT_FALSE(cell.solved) << solver_key(k);
    EXPECT_TRUE(std::isinf(cell.value(MeasureKind::iterations)));
  }
}

TEST(Measure, RuntimeIsRecorded) {
  const auto pr = test::pair_with_cf(10, 3, 3, 1, 0.5, 2);
  const auto p = make_problem({AffineSubspace(pr.u1), AffineSubspace(pr.u2)}, Vector::Constant(10, 1.0));
  const auto cell = measure(p, SolverSpec{SolverKind::crm_s2}, {}, MeasureKind::runtime);
  ASSERT_TRUE(cell.solved);
  ASSERT_TRUE(cell.runtime.has_value());
  EXPECT_GE(cell.runtime->count(), 0);
  EXPECT_FALSE(measure(p, SolverSpec{SolverKind::crm_s2}, {}, MeasureKind::iterations).runtime.has_value());
}

TEST(Profile, SingleSolverAllSolved) {
  const auto prof = performance_profile(table({{3}, {5}, {9}}), MeasureKind::iterations);
  EXPECT_DOUBLE_EQ(rho_at(prof.curves[0], 1.0), 1.0);
}

TEST(Profile, HandArithmetic) {
  const auto prof = performance_profile(table({{1, 2}, {2, 2}}), MeasureKind::iterations);
  EXPECT_DOUBLE_EQ(rho_at(prof.curves[0], 1.0), 1.0);
  EXPECT_DOUBLE_EQ(rho_at(prof.curves[1], 1.0), 0.5);
  EXPECT_DOUBLE_EQ(rho_at(prof.curves[1], 2.0), 1.0);
}

TEST(Profile, UnsolvedCellPlateausBelowOne) {
  const auto prof = performance_profile(table({{1, 2}, {3, -1}, {4, 4}}), MeasureKind::iterations);
  EXPECT_LT(prof.curves[1].breakpoints.back().second, 1.0);
  EXPECT_DOUBLE_EQ(prof.curves[1].breakpoints.back().second, 2.0 / 3.0);
}

TEST(Profile, AllUnsolvedProblemExcluded) {
  const auto prof = performance_profile(table({{1, 2}, {-1, -1}}), MeasureKind::iterations);
  ASSERT_EQ(prof.excluded_problems.size(), 1u);
  EXPECT_EQ(prof.excluded_problems[0], "p1");
  EXPECT_DOUBLE_EQ(prof.curves[0].breakpoints.back().second, 1.0);
}

TEST(Profile, MonotoneBoundedAndCountsSolved) {
  Rng rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<int>> rows(12, std::vector<int>(4));
    for (auto& r : rows)
      for (auto& v : r) v = rng.uniform() < 0.15 ? -1 : static_cast<int>(1 + 50 * rng.uniform());
    const auto m = table(rows);
    const auto prof = performance_profile(m, MeasureKind::iterations);
    const double np = static_cast<double>(m.problems.size() - prof.excluded_problems.size());
    for (std::size_t s = 0; s < prof.curves.size(); ++s) {
      const auto& bp = prof.curves[s].breakpoints;
      for (std::size_t i = 0; i < bp.size(); ++i) {
        EXPECT_GE(bp[i].first, 1.0);
        EXPECT_GE(bp[i].second, 0.0);
        EXPECT_LE(bp[i].second, 1.0);
        if (i > 0) {
          EXPECT_GT(bp[i].first, bp[i - 1].first);
          EXPECT_GE(bp[i].second, bp[i - 1].second);
        }
      }
      double solved = 0;
      for (std::size_t p = 0; p < m.problems.size(); ++p) {
        bool any = false;
        for (std::size_t q = 0; q < m.solvers.size(); ++q) any = any || m.at(p, q).solved;
        if (any && m.at(p, s).solved) solved += 1;
      }
      EXPECT_DOUBLE_EQ(bp.back().second, solved / np);
    }
  }
}

TEST(Profile, InvariantUnderSolverReordering) {
  const std::vector<std::vector<int>> rows{{3, 5, 9}, {7, 2, -1}, {4, 4, 8}, {10, 30, 20}};
  std::vector<std::vector<int>> swapped;
  for (const auto& r : rows) swapped.push_back({r[2], r[0], r[1]});
  const auto a = performance_profile(table(rows), MeasureKind::iterations);
  const auto b = performance_profile(table(swapped), MeasureKind::iterations);
  EXPECT_EQ(a.curves[0].breakpoints, b.curves[1].breakpoints);
  EXPECT_EQ(a.curves[1].breakpoints, b.curves[2].breakpoints);
  EXPECT_EQ(a.curves[2].breakpoints, b.curves[0].breakpoints);
}

TEST(Csv, MatrixRoundTripAndProfileColumns) {
  const auto m = table({{1, 2}, {2, -1}});
  const auto back = parse_matrix_csv(matrix_csv(m));
  EXPECT_EQ(back.problems, m.problems);
  EXPECT_EQ(back.solvers, m.solvers);
  EXPECT_EQ(matrix_csv(back), matrix_csv(m));
  const auto csv = profile_csv(performance_profile(m, MeasureKind::iterations));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,log2_tau,s0,s1");
  EXPECT_THROW(parse_matrix_csv("a,b\n"), FormatError);
  EXPECT_THROW(parse_matrix_csv("problem_id,solver,solved,iterations,runtime_ns\np,s,x,1,\n"), FormatError);
}

TEST(Csv, ProfilePath) {
  EXPECT_EQ(profile_path_for("out/m.csv"), "out/m.profile.csv");
  EXPECT_EQ(profile_path_for("a.b/m"), "a.b/m.profile.csv");
}

TEST(RunBenchmark, ShapeAndDeterminism) {
  const auto set = small_set();
  const auto in = temp_path("set.json"), out1 = temp_path("m1.csv"), out2 = temp_path("m2.csv");
  save_problem_set(set, in);
  const auto specs = parse_solver_list("crm-s1,crm-s2,crm-s3,crm-s4,drm,map");
  const auto r1 = run_benchmark(in, specs, {}, MeasureKind::iterations, out1, 1);
  const auto r2 = run_benchmark(in, specs, {}, MeasureKind::iterations, out2, 3);
  const std::string csv1 = read_text(out1);
  EXPECT_EQ(csv1, read_text(out2));
  EXPECT_EQ(read_text(r1.profile_path), read_text(r2.profile_path));
  EXPECT_EQ(std::count(csv1.begin(), csv1.end(), '\n'), 1 + 9 * 6);

  const auto rt = run_benchmark(in, specs, {}, MeasureKind::runtime, temp_path("mt.csv"), 1);
  for (std::size_t i = 0; i < rt.matrix.cells.size(); ++i) {
    EXPECT_EQ(rt.matrix.cells[i].iterations, r1.matrix.cells[i].iterations);
    EXPECT_EQ(rt.matrix.cells[i].solved, r1.matrix.cells[i].solved);
    EXPECT_EQ(rt.matrix.cells[i].runtime.has_value(), rt.matrix.cells[i].solved);
  }
  for (const auto& p : {in, out1, out2, r1.profile_path, r2.profile_path, rt.matrix_path, rt.profile_path}) {
    std::filesystem::remove(p);
  }
}

TEST(RunBenchmark, UnknownSolverKey) { EXPECT_THROW(parse_solver_list("crm-s1,foo"), InputError); }

TEST(RunBenchmark, MissingFile) {
  EXPECT_THROW(run_benchmark(temp_path("nope.json"), parse_solver_list("map"), {}, MeasureKind::iterations,
                             temp_path("nope.csv")),
               std::runtime_error);
}
