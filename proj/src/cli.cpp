#include "sobolev/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sobolev/bench.hpp"
#include "sobolev/problems.hpp"

namespace sobolev {

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

struct CommonFlags {
  double rhobeg = 0.5;
  int maxfun = 1000;
  int npt = 0;
  std::uint64_t seed = 0;
  double M = 10.0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--rhobeg", f.rhobeg, "Initial trust-region radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--maxfun", f.maxfun, "Evaluation budget per run")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--npt", f.npt, "Interpolation points")->check(CLI::PositiveNumber)->default_str("2n+1");
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--M", f.M, "Ball radius multiplier of the sigma rules")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

SolverConfig make_config(const CommonFlags& f, double rhoend) {
  SolverConfig c;
  c.rhobeg = f.rhobeg;
  c.rhoend = rhoend;
  c.maxfun = f.maxfun;
  c.npt = f.npt;
  c.seed = f.seed;
  c.sigma_rule.M = f.M;
  return c;
}

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string format_point(const Vector& x, Eigen::Index shown = 6) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < std::min(shown, x.size()); ++i) {
    if (i > 0) s += ',';
    s += format_g(x[i], 8);
  }
  if (x.size() > shown) s += ",...";
  return s + "]";
}

void open_output(std::ofstream& file, const std::string& path) {
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
}

int do_solve(const std::string& problem_name, int n, const std::string& solver, double rhoend, const CommonFlags& f,
             std::ostream& out) {
  const ProblemDef problem = instantiate(problem_name, n);
  SolverConfig config = make_config(f, rhoend);
  config.sigma_rule = solver_rule(solver, f.M);
  config.validate(n);
  const SolverReport report = minimize(problem.objective, problem.start, config);
  out << "problem=" << problem.name << " n=" << n << " solver=" << solver << " status=" << to_string(report.status)
      << " nf=" << report.nf << " fbest=" << format_g(report.best_value, 17)
      << " x_best=" << format_point(report.best_point) << '\n';
  return report.status == SolverStatus::error ? kRuntime : kOk;
}

int do_bench(SuiteSpec spec, const std::vector<double>& rhoends, const std::string& out_path, std::ostream& out) {
  std::vector<RunRecord> records;
  for (double rhoend : rhoends) {
    spec.config.rhoend = rhoend;
    auto part = run_suite(spec);
    records.insert(records.end(), part.begin(), part.end());
  }
  if (out_path == "-") {
    emit_csv(out, records);
    return kOk;
  }
  std::ofstream file;
  open_output(file, out_path);
  emit_csv(file, records);
  if (!file) throw std::runtime_error("failed writing '" + out_path + "'");
  return kOk;
}

int do_profile(const std::string& in_path, const std::string& metric_name, const std::string& out_path,
               const std::string& svg_path, std::ostream& out) {
  const ProfileMetric metric = parse_metric(metric_name);
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + in_path + "'");
  const auto records = parse_csv(in);
  if (records.empty()) throw std::runtime_error("'" + in_path + "' contains no records");
  const ProfileTable table = build_cost_table(records, metric);
  const auto curves = performance_profile(table.costs, table.solvers);
  if (out_path == "-") {
    emit_profile_csv(out, curves);
  } else {
    std::ofstream file;
    open_output(file, out_path);
    emit_profile_csv(file, curves);
  }
  if (!svg_path.empty()) {
    std::ofstream svg;
    open_output(svg, svg_path);
    emit_profile_svg(svg, curves, "performance profile: " + metric_name + "(#F)");
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Derivative-free minimization with Sobolev-norm interpolation models"};
  app.name("sobolev_dfo");
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Minimize one suite problem and print the result");
  std::string problem;
  int n = 0;
  std::string solver = "esymbs";
  double solve_rhoend = 1e-6;
  CommonFlags solve_flags;
  solve->add_option("--problem", problem, "Problem name")->required();
  solve->add_option("--n", n, "Dimension")->required()->check(CLI::PositiveNumber);
  solve->add_option("--solver", solver, "esymbs, esymbp or symb")->capture_default_str();
  solve->add_option("--rhoend", solve_rhoend, "Final trust-region radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(solve, solve_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "Run permuted replicas of the suite and write a records CSV");
  std::vector<std::string> problems = problem_names();
  std::vector<int> dims = {6, 8, 10};
  std::vector<std::string> solvers = solver_names();
  std::vector<double> rhoends = {1e-6};
  int perms = 10;
  unsigned threads = 0;
  std::string bench_out;
  CommonFlags bench_flags;
  bench->add_option("--problems", problems, "Comma-separated problem names")->delimiter(',')->capture_default_str();
  bench->add_option("--dims", dims, "Comma-separated dimensions")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--solvers", solvers, "Comma-separated solver names")->delimiter(',')->capture_default_str();
  bench->add_option("--rhoend", rhoends, "Comma-separated final radii")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--perms", perms, "Permutations per instance")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  bench->add_option("--out", bench_out, "Output CSV path, - for stdout")->required();
  add_common(bench, bench_flags);

  // profile
  auto* profile = app.add_subcommand("profile", "Build performance profiles from a records CSV");
  std::string in_path;
  std::string metric = "mean";
  std::string profile_out;
  std::string svg_path;
  profile->add_option("--in", in_path, "Records CSV")->required();
  profile->add_option("--metric", metric, "Cost metric")
      ->check(CLI::IsMember({"mean", "rstd"}))
      ->capture_default_str();
  profile->add_option("--out", profile_out, "Profile CSV path, - for stdout")->required();
  profile->add_option("--svg", svg_path, "Optional SVG plot path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and friends report exit code 0
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }

  try {
    if (solve->parsed()) return do_solve(problem, n, solver, solve_rhoend, solve_flags, out);
    if (bench->parsed()) {
      SuiteSpec spec;
      spec.solvers = solvers;
      spec.problems = problems;
      spec.dims = dims;
      spec.perms = perms;
      spec.base_seed = bench_flags.seed;
      spec.config = make_config(bench_flags, rhoends.front());
      spec.threads = threads;
      return do_bench(spec, rhoends, bench_out, out);
    }
    return do_profile(in_path, metric, profile_out, svg_path, out);
  } catch (const std::invalid_argument& e) {
    // unknown names and out-of-range combinations such as bdqrtic with n < 5
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace sobolev
