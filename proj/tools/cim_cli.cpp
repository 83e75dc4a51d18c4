// cim: problem generation, single solves, benchmark grids and profiles.

#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cim/cim.hpp"

namespace {

cim::InitTransform parse_init(const std::string& s) {
  if (s == "none") return cim::InitTransform::none;
  if (s == "u1") return cim::InitTransform::project_u1;
  if (s == "u2") return cim::InitTransform::project_u2;
  if (s == "sum") return cim::InitTransform::project_sum;
  throw cim::InputError("unknown init transform '" + s + "' (expected none, u1, u2 or sum)");
}

cim::IterationConfig make_config(double tol, std::int64_t max_iter) {
  cim::IterationConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.validate();
  return cfg;
}

struct GenArgs {
  cim::Index n = 100;
  double cf_lo = 0.9;
  double cf_hi = 0.95;
  cim::Index pairs = 10;
  cim::Index points = 10;
  std::uint64_t seed = 0;
  cim::Index p = -1, q = -1, r = -1;
  double x0_norm = 10.0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  cim::ProblemSpec spec = cim::ProblemSpec::with_default_dims(a.n);
  if (a.p >= 0) spec.p = a.p;
  if (a.q >= 0) spec.q = a.q;
  if (a.r >= 0) spec.r = a.r;
  spec.angles = cim::CosineRange{a.cf_lo, a.cf_hi};
  spec.pairs = a.pairs;
  spec.points_per_pair = a.points;
  spec.seed = a.seed;
  spec.x0_norm = a.x0_norm;
  const cim::ProblemSet set = cim::generate_problem_set(spec);
  cim::save_problem_set(set, a.out);
  std::cout << "wrote " << set.problem_count() << " problems (" << set.pairs.size() << " pairs, n=" << set.n
            << ") to " << a.out << "\n";
  return 0;
}

struct SolveArgs {
  std::string problem_set;
  std::string problem_id;
  std::string solver;
  std::string init = "none";
  double tol = 1e-6;
  std::int64_t max_iter = 1'000'000;
  std::string trace;
};

int run_solve(const SolveArgs& a) {
  const cim::ProblemSet set = cim::load_problem_set(a.problem_set);
  const cim::Problem problem = set.find(a.problem_id);
  cim::IterationConfig cfg = make_config(a.tol, a.max_iter);
  cfg.record_trace = !a.trace.empty();
  const cim::SolverSpec spec{cim::parse_solver_kind(a.solver), parse_init(a.init)};
  const cim::Solver solver = cim::make_solver(spec, problem.subspaces);
  const cim::Trace t = cim::solve(solver, problem.x0, cfg, problem.reference);

  if (!a.trace.empty()) {
    std::ostringstream os;
    os << "k,error\n";
    for (std::size_t k = 0; k < t.errors.size(); ++k) os << k << ',' << cim::format_double(t.errors[k]) << '\n';
    cim::write_text(a.trace, os.str());
  }
  std::cout << "problem " << problem.id << " solver " << solver.key << ": " << (t.solved ? "solved" : "unsolved")
            << " after " << t.iterations << " iterations, error " << t.errors.back() << "\n";
  return 0;
}

struct BenchArgs {
  std::string problem_set;
  std::string solvers = "crm-s1,crm-s2,crm-s3,crm-s4,drm,map";
  std::string measure = "iters";
  double tol = 1e-6;
  std::int64_t max_iter = 1'000'000;
  std::string out;
  unsigned threads = 0;
};

int run_bench(const BenchArgs& a) {
  const auto specs = cim::parse_solver_list(a.solvers);
  const auto kind = cim::parse_measure_kind(a.measure);
  const auto r = cim::run_benchmark(a.problem_set, specs, make_config(a.tol, a.max_iter), kind, a.out, a.threads);
  std::size_t solved = 0;
  for (const auto& c : r.matrix.cells) solved += c.solved ? 1 : 0;
  std::cout << r.matrix.problems.size() << " problems x " << r.matrix.solvers.size() << " solvers, " << solved << "/"
            << r.matrix.cells.size() << " cells solved\n";
  for (const auto& id : r.profile.excluded_problems) std::cerr << "warning: no solver solved " << id << "\n";
  std::cout << "matrix: " << r.matrix_path << "\nprofile: " << r.profile_path << "\n";
  return 0;
}

struct ProfileArgs {
  std::string matrix;
  std::string out;
  std::string measure = "iters";
};

int run_profile(const ProfileArgs& a) {
  const auto m = cim::parse_matrix_csv(cim::read_text(a.matrix));
  const auto prof = cim::performance_profile(m, cim::parse_measure_kind(a.measure));
  for (const auto& id : prof.excluded_problems) std::cerr << "warning: no solver solved " << id << "\n";
  cim::write_text(a.out, cim::profile_csv(prof));
  std::cout << "profile: " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circumcentered reflection methods and projection solvers for subspace intersections"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a problem set");
  g->add_option("--n", gen.n, "Ambient dimension")->capture_default_str();
  g->add_option("--cf-lo", gen.cf_lo, "Lower end of the c_F range")->capture_default_str();
  g->add_option("--cf-hi", gen.cf_hi, "Upper end of the c_F range (exclusive)")->capture_default_str();
  g->add_option("--pairs", gen.pairs, "Number of subspace pairs")->capture_default_str();
  g->add_option("--points", gen.points, "Initial points per pair")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  g->add_option("--p", gen.p, "dim U1 (default n/4)");
  g->add_option("--q", gen.q, "dim U2 (default n/4)");
  g->add_option("--r", gen.r, "dim of U1 ∩ U2 (default n/20)");
  g->add_option("--x0-norm", gen.x0_norm, "Norm of the initial points")->capture_default_str();
  g->add_option("--out", gen.out, "Output JSON path")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Run one solver on one problem");
  s->add_option("--problem-set", sol.problem_set, "Problem-set JSON")->required();
  s->add_option("--problem-id", sol.problem_id, "Problem id, e.g. pair000-x00")->required();
  s->add_option("--solver", sol.solver, "Solver key")->required();
  s->add_option("--init", sol.init, "Initial transform: none, u1, u2 or sum")->capture_default_str();
  s->add_option("--tol", sol.tol, "Tolerance on the true error")->capture_default_str();
  s->add_option("--max-iter", sol.max_iter, "Iteration cap")->capture_default_str();
  s->add_option("--trace", sol.trace, "Write the error history as CSV");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a solver grid and write matrix and profile CSVs");
  b->add_option("--problem-set", bench.problem_set, "Problem-set JSON")->required();
  b->add_option("--solvers", bench.solvers, "Comma-separated solver keys")->capture_default_str();
  b->add_option("--measure", bench.measure, "iters or time")->capture_default_str();
  b->add_option("--tol", bench.tol, "Tolerance on the true error")->capture_default_str();
  b->add_option("--max-iter", bench.max_iter, "Iteration cap")->capture_default_str();
  b->add_option("--out", bench.out, "Matrix CSV path (profile goes to <stem>.profile.csv)")->required();
  b->add_option("--threads", bench.threads, "Worker threads (default: CIM_THREADS or all cores)");

  ProfileArgs prof;
  auto* p = app.add_subcommand("profile", "Compute performance profiles from a matrix CSV");
  p->add_option("--matrix", prof.matrix, "Matrix CSV")->required();
  p->add_option("--out", prof.out, "Profile CSV path")->required();
  p->add_option("--measure", prof.measure, "iters or time")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_gen(gen);
    if (*s) return run_solve(sol);
    if (*b) return run_bench(bench);
    if (*p) return run_profile(prof);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
