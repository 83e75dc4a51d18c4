#pragma once

// Solver x problem grids, the two performance measures (iterations and
// runtime), Dolan-Moré performance profiles and their CSV forms.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cim/problem_io.hpp"
#include "cim/problems.hpp"
#include "cim/solvers.hpp"

namespace cim {

enum class MeasureKind { iterations, runtime };

inline MeasureKind parse_measure_kind(std::string_view s) {
  if (s == "iters" || s == "iterations") return MeasureKind::iterations;
  if (s == "time" || s == "runtime") return MeasureKind::runtime;
  throw InputError("unknown measure '" + std::string(s) + "' (expected iters or time)");
}

struct PerformanceCell {
  std::string problem_id;
  std::string solver_key;
  /// Iterations performed (the smallest k meeting the tolerance when solved).
  std::int64_t iterations = 0;
  /// Solve-loop wall time; only present for the runtime measure.
  std::optional<std::chrono::nanoseconds> runtime;
  bool solved = false;
  std::string diagnostic;

  /// t_{p,s}, or +inf when unsolved.
  double value(MeasureKind kind) const {
    if (!solved) return std::numeric_limits<double>::infinity();
    if (kind == MeasureKind::iterations) return static_cast<double>(iterations);
    if (!runtime) throw InputError("performance cell " + problem_id + "/" + solver_key + " has no runtime");
    return static_cast<double>(runtime->count());
  }
};

/// Number of timed repetitions per runtime cell; the minimum is kept.
inline constexpr int kRuntimeRepetitions = 3;

/// One cell with an already-built solver.
inline PerformanceCell measure(const Problem& problem, const Solver& solver, const IterationConfig& cfg,
                               MeasureKind kind) {
  PerformanceCell cell{problem.id, solver.key, 0, std::nullopt, false, {}};
  IterationConfig run_cfg = cfg;
  run_cfg.record_trace = false;
  try {
    const int reps = kind == MeasureKind::runtime ? kRuntimeRepetitions : 1;
    for (int rep = 0; rep < reps; ++rep) {
      const Trace t = solve(solver, problem.x0, run_cfg, problem.reference);
      cell.iterations = t.iterations;
      cell.solved = t.solved;
      if (kind == MeasureKind::runtime) cell.runtime = cell.runtime ? std::min(*cell.runtime, t.wall_time) : t.wall_time;
    }
  } catch (const NumericalError& e) {
    cell.solved = false;
    cell.runtime.reset();
    cell.diagnostic = e.what();
  }
  if (!cell.solved && kind == MeasureKind::runtime) cell.runtime.reset();
  return cell;
}

inline PerformanceCell measure(const Problem& problem, const SolverSpec& spec, const IterationConfig& cfg,
                               MeasureKind kind) {
  return measure(problem, make_solver(spec, problem.subspaces), cfg, kind);
}

/// Cells of a problems x solvers grid, stored row-major by problem.
struct PerformanceMatrix {
  std::vector<std::string> problems;
  std::vector<std::string> solvers;
  std::vector<PerformanceCell> cells;

  const PerformanceCell& at(std::size_t p, std::size_t s) const { return cells[p * solvers.size() + s]; }
};

struct ProfileCurve {
  std::string solver_key;
  /// (τ, ρ(τ)) at every breakpoint, τ ascending.
  std::vector<std::pair<double, double>> breakpoints;
};

struct Profile {
  std::vector<ProfileCurve> curves;
  std::vector<std::string> excluded_problems;
};

/// Dolan-Moré profiles: r_{p,s} = t_{p,s} / min_s t_{p,s} (+inf when
/// unsolved), ρ_s(τ) = |{p : r_{p,s} <= τ}| / |P|. Measures are clamped to
/// at least 1 so a problem solved at k = 0 keeps finite ratios. Problems that
/// no solver solved are excluded.
inline Profile performance_profile(const PerformanceMatrix& m, MeasureKind kind) {
  if (m.problems.empty() || m.solvers.empty()) throw InputError("performance_profile: empty matrix");
  const std::size_t ns = m.solvers.size();
  std::vector<std::vector<double>> ratios(ns);
  Profile out;
  for (std::size_t p = 0; p < m.problems.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> t(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      t[s] = m.at(p, s).value(kind);
      if (std::isfinite(t[s])) t[s] = std::max(t[s], 1.0);
      best = std::min(best, t[s]);
    }
    if (!std::isfinite(best)) {
      out.excluded_problems.push_back(m.problems[p]);
      continue;
    }
    for (std::size_t s = 0; s < ns; ++s) ratios[s].push_back(t[s] / best);
  }
  const std::size_t np = ratios.front().size();
  std::set<double> taus;
  for (const auto& rs : ratios)
    for (double r : rs)
      if (std::isfinite(r)) taus.insert(r);
  if (taus.empty()) taus.insert(1.0);

  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> sorted = ratios[s];
    std::sort(sorted.begin(), sorted.end());
    ProfileCurve c{m.solvers[s], {}};
    for (double tau : taus) {
      const auto count = std::upper_bound(sorted.begin(), sorted.end(), tau) - sorted.begin();
      c.breakpoints.emplace_back(tau, np == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(np));
    }
    out.curves.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------- CSV

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string matrix_csv(const PerformanceMatrix& m) {
  std::ostringstream os;
  os << "problem_id,solver,solved,iterations,runtime_ns\n";
  for (const auto& c : m.cells) {
    os << c.problem_id << ',' << c.solver_key << ',' << (c.solved ? 1 : 0) << ',' << c.iterations << ',';
    if (c.runtime) os << c.runtime->count();
    os << '\n';
  }
  return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline PerformanceMatrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"problem_id", "solver", "solved", "iterations",
                                                              "runtime_ns"}) {
    throw FormatError("matrix CSV: unexpected header");
  }
  PerformanceMatrix m;
  std::map<std::string, std::size_t> pidx, sidx;
  std::map<std::pair<std::size_t, std::size_t>, PerformanceCell> cells;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw FormatError("matrix CSV line " + std::to_string(lineno) + ": expected 5 fields");
    PerformanceCell c;
    c.problem_id = f[0];
    c.solver_key = f[1];
    try {
      c.solved = std::stoi(f[2]) != 0;
      c.iterations = std::stoll(f[3]);
      if (!f[4].empty()) c.runtime = std::chrono::nanoseconds(std::stoll(f[4]));
    } catch (const std::exception&) {
      throw FormatError("matrix CSV line " + std::to_string(lineno) + ": malformed number");
    }
    if (!pidx.count(c.problem_id)) {
      pidx[c.problem_id] = m.problems.size();
      m.problems.push_back(c.problem_id);
    }
    if (!sidx.count(c.solver_key)) {
      sidx[c.solver_key] = m.solvers.size();
      m.solvers.push_back(c.solver_key);
    }
    cells[{pidx[c.problem_id], sidx[c.solver_key]}] = std::move(c);
  }
  if (cells.size() != m.problems.size() * m.solvers.size()) throw FormatError("matrix CSV: grid is incomplete");
  for (auto& [key, cell] : cells) m.cells.push_back(std::move(cell));
  return m;
}

/// Columns: tau, log2_tau, then one ρ column per solver.
inline std::string profile_csv(const Profile& prof) {
  std::ostringstream os;
  os << "tau,log2_tau";
  for (const auto& c : prof.curves) os << ',' << c.solver_key;
  os << '\n';
  if (prof.curves.empty()) return os.str();
  for (std::size_t i = 0; i < prof.curves.front().breakpoints.size(); ++i) {
    const double tau = prof.curves.front().breakpoints[i].first;
    os << format_double(tau) << ',' << format_double(std::log2(tau));
    for (const auto& c : prof.curves) os << ',' << format_double(c.breakpoints[i].second);
    os << '\n';
  }
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- grid

/// Worker count: CIM_THREADS if set, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("CIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every (problem, solver) cell of a problem set. Solvers are built
/// once per subspace pair. Cells are written to fixed slots, so results do
/// not depend on scheduling. Runtime measurements run one at a time.
inline PerformanceMatrix run_grid(const ProblemSet& set, const std::vector<SolverSpec>& specs,
                                  const IterationConfig& cfg, MeasureKind kind, unsigned threads = 0) {
  PerformanceMatrix m;
  for (const auto& s : specs) m.solvers.emplace_back(solver_key(s.kind));
  const auto problems = set.problems();
  for (const auto& p : problems) m.problems.push_back(p.id);
  m.cells.resize(problems.size() * specs.size());

  // Work unit: (pair, solver).
  std::vector<std::size_t> first_problem;
  std::size_t offset = 0;
  for (const auto& pr : set.pairs) {
    first_problem.push_back(offset);
    offset += pr.points.size();
  }
  const std::size_t units = set.pairs.size() * specs.size();
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t u = next++; u < units; u = next++) {
      const std::size_t pi = u / specs.size();
      const std::size_t si = u % specs.size();
      const auto& pr = set.pairs[pi];
      const AffineSubspace subspaces[] = {pr.u1, pr.u2};
      std::optional<Solver> solver;
      std::string build_error;
      try {
        solver = make_solver(specs[si], subspaces);
      } catch (const std::exception& e) {
        build_error = e.what();
      }
      for (std::size_t j = 0; j < pr.points.size(); ++j) {
        const std::size_t p = first_problem[pi] + j;
        PerformanceCell& cell = m.cells[p * specs.size() + si];
        if (!solver) {
          cell = {problems[p].id, m.solvers[si], 0, std::nullopt, false, build_error};
          continue;
        }
        cell = measure(problems[p], *solver, cfg, kind);
      }
    }
  };
  if (threads == 0) threads = worker_count();
  if (kind == MeasureKind::runtime) threads = 1;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(units, 1)));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
  }
  return m;
}

inline std::vector<SolverSpec> parse_solver_list(const std::string& csv) {
  std::vector<SolverSpec> out;
  for (const auto& key : split_csv_line(csv)) {
    if (key.empty()) continue;
    out.push_back({parse_solver_kind(key)});
  }
  if (out.empty()) throw InputError("no solvers given");
  return out;
}

/// Profile CSV path written next to a matrix CSV: "m.csv" -> "m.profile.csv".
inline std::string profile_path_for(const std::string& matrix_path) {
  const auto dot = matrix_path.rfind('.');
  const auto slash = matrix_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return matrix_path + ".profile.csv";
  return matrix_path.substr(0, dot) + ".profile" + matrix_path.substr(dot);
}

struct BenchmarkResult {
  PerformanceMatrix matrix;
  Profile profile;
  std::string matrix_path;
  std::string profile_path;
};

/// Loads a problem set, runs the grid, writes the matrix CSV to out_path and
/// the profile CSV next to it.
inline BenchmarkResult run_benchmark(const std::string& problems_path, const std::vector<SolverSpec>& specs,
                                     const IterationConfig& cfg, MeasureKind kind, const std::string& out_path,
                                     unsigned threads = 0) {
  const ProblemSet set = load_problem_set(problems_path);
  BenchmarkResult r;
  r.matrix = run_grid(set, specs, cfg, kind, threads);
  r.profile = performance_profile(r.matrix, kind);
  r.matrix_path = out_path;
  r.profile_path = profile_path_for(out_path);
  write_text(r.matrix_path, matrix_csv(r.matrix));
  write_text(r.profile_path, profile_csv(r.profile));
  return r;
}

}  // namespace cim
