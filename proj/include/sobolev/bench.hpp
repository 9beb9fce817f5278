#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sobolev/solver.hpp"

namespace sobolev {

class UnknownSolverError : public std::invalid_argument {
 public:
  explicit UnknownSolverError(std::string name)
      : std::invalid_argument("unknown solver '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// "esymbs" (geometric sigma), "esymbp" (eta/xi surrogate), "symb" (sigma = 0).
SigmaRule solver_rule(std::string_view solver, double M = 10.0);
const std::vector<std::string>& solver_names();

struct RunRecord {
  std::string solver;
  std::string problem;
  int n = 0;
  int perm_index = 0;
  std::uint64_t seed = 0;
  double rhoend = 0.0;
  int nf = 0;
  double fbest = 0.0;
  SolverStatus status = SolverStatus::error;

  bool operator==(const RunRecord&) const = default;
};

struct SuiteSpec {
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  std::vector<int> dims;
  int perms = 10;
  std::uint64_t base_seed = 0;
  /// Template for every run; its sigma rule is replaced by the solver's.
  SolverConfig config;
  /// Worker threads; 0 uses the hardware concurrency. Output does not depend on it.
  unsigned threads = 0;
};

/// Seed of the permutation for (problem, n, perm_index); identical for every solver.
std::uint64_t permutation_seed(std::uint64_t base_seed, std::string_view problem, int n, int perm_index);

/**
 * One record per (solver, problem, n, perm_index), sorted by that key. Errors
 * inside a run become status=error records.
 */
std::vector<RunRecord> run_suite(const SuiteSpec& spec);

struct StatSummary {
  double mean = 0.0;
  double std = 0.0;
  double rstd = 0.0;
  std::size_t count = 0;
};

/// Mean, population standard deviation and their ratio.
StatSummary summarize(const std::vector<int>& nf_values);

struct ProfileCurve {
  std::string solver;
  /// (tau, fraction) pairs, tau ascending from 1; the curve is right-continuous.
  std::vector<std::pair<double, double>> breakpoints;

  /// Fraction of problems with ratio <= tau.
  double at(double tau) const;
};

inline constexpr double kCostFloor = 1e-12;

/// costs[p][s]: cost of solver s on problem p, nullopt when it failed.
using CostMatrix = std::vector<std::vector<std::optional<double>>>;

std::vector<ProfileCurve> performance_profile(const CostMatrix& costs, const std::vector<std::string>& solvers);

enum class ProfileMetric { mean, rstd };
ProfileMetric parse_metric(std::string_view name);

/**
 * A run counts as solved when it converged or stalled and, for problems with a
 * known minimum, fbest <= fmin + max(1e-6, 1e-4 |fmin|); without a known
 * minimum only convergence counts.
 */
bool run_solved(const RunRecord& record);

struct ProfileTable {
  std::vector<std::string> solvers;
  /// One label per row: "problem/n/rhoend".
  std::vector<std::string> instances;
  CostMatrix costs;
};

/// Aggregates the permuted replicas of each instance; an instance fails for a solver if any replica failed.
ProfileTable build_cost_table(const std::vector<RunRecord>& records, ProfileMetric metric);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kRecordHeader = "solver,problem,n,perm,seed,rhoend,nf,fbest,status";

void emit_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::string emit_csv(const std::vector<RunRecord>& records);
/// Throws CsvError naming the offending line.
std::vector<RunRecord> parse_csv(std::istream& in);
std::vector<RunRecord> parse_csv(const std::string& text);

void emit_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves);
void emit_profile_svg(std::ostream& out, const std::vector<ProfileCurve>& curves, std::string_view title);

}  // namespace sobolev
