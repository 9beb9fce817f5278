#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sobolev/bench.hpp"

using namespace sobolev;

namespace {

SuiteSpec small_suite() {
  SuiteSpec spec;
  spec.solvers = {"esymbs"};
  spec.problems = {"sphere"};
  spec.dims = {6};
  spec.perms = 2;
  spec.config.rhoend = 1e-4;
  return spec;
}

void expect_nondecreasing(const ProfileCurve& c) {
  ASSERT_FALSE(c.breakpoints.empty());
  EXPECT_EQ(c.breakpoints.front().first, 1.0);
  for (std::size_t k = 1; k < c.breakpoints.size(); ++k) {
    EXPECT_GT(c.breakpoints[k].first, c.breakpoints[k - 1].first);
    EXPECT_GE(c.breakpoints[k].second, c.breakpoints[k - 1].second);
  }
  EXPECT_LE(c.breakpoints.back().second, 1.0);
}

}  // namespace

TEST(Summarize, WorkedValues) {
  auto s = summarize({100, 100, 100});
  EXPECT_EQ(s.mean, 100.0);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.rstd, 0.0);
  s = summarize({90, 110});
  EXPECT_EQ(s.mean, 100.0);
  EXPECT_EQ(s.std, 10.0);
  EXPECT_EQ(s.rstd, 0.1);
  EXPECT_EQ(s.count, 2u);
  s = summarize({1, 2, 3});
  EXPECT_NEAR(s.std, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.rstd, 0.40824829046386302, 1e-15);
  EXPECT_THROW(summarize({}), std::invalid_argument);
}

TEST(Summarize, ScaleEquivariant) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> u(1, 500);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> v(10), w(10);
    for (int i = 0; i < 10; ++i) {
      v[static_cast<std::size_t>(i)] = u(rng);
      w[static_cast<std::size_t>(i)] = 7 * v[static_cast<std::size_t>(i)];
    }
    const auto a = summarize(v), b = summarize(w);
    EXPECT_NEAR(b.mean, 7.0 * a.mean, 1e-12 * b.mean);
    EXPECT_NEAR(b.std, 7.0 * a.std, 1e-10 * (1.0 + b.std));
    EXPECT_NEAR(b.rstd, a.rstd, 1e-12);
  }
}

TEST(PerformanceProfile, ThreeProblemFixture) {
  const CostMatrix costs = {{10.0, 20.0}, {30.0, 15.0}, {std::nullopt, 5.0}};
  const auto curves = performance_profile(costs, {"a", "b"});
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].solver, "a");
  EXPECT_DOUBLE_EQ(curves[0].at(1.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(curves[1].at(1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curves[0].at(2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curves[1].at(2.0), 1.0);
  EXPECT_DOUBLE_EQ(curves[0].at(std::numeric_limits<double>::max()), 2.0 / 3.0);
  EXPECT_EQ(curves[0].at(0.5), 0.0);
  for (const auto& c : curves) expect_nondecreasing(c);
}

TEST(PerformanceProfile, SingleAndIdenticalSolvers) {
  const CostMatrix one = {{3.0}, {8.0}, {1.0}};
  const auto c = performance_profile(one, {"only"});
  ASSERT_EQ(c[0].breakpoints.size(), 1u);
  EXPECT_EQ(c[0].breakpoints[0], (std::pair<double, double>{1.0, 1.0}));

  const CostMatrix twins = {{3.0, 3.0}, {8.0, 8.0}};
  const auto t = performance_profile(twins, {"x", "y"});
  EXPECT_EQ(t[0].breakpoints, t[1].breakpoints);
  EXPECT_EQ(t[0].at(1.0), 1.0);
}

TEST(PerformanceProfile, FloorAndAllFailedRows) {
  // two zero rstd costs tie at the floor; the all-failed row still counts in the denominator
  const CostMatrix costs = {{0.0, 0.0}, {std::nullopt, std::nullopt}};
  const auto c = performance_profile(costs, {"x", "y"});
  EXPECT_DOUBLE_EQ(c[0].at(1.0), 0.5);
  EXPECT_DOUBLE_EQ(c[1].at(1e9), 0.5);
  EXPECT_THROW(performance_profile({}, {"x"}), std::invalid_argument);
  EXPECT_THROW(performance_profile({{1.0}}, {"x", "y"}), std::invalid_argument);
  EXPECT_THROW(performance_profile({{-1.0}}, {"x"}), std::invalid_argument);
}

TEST(PerformanceProfile, RandomInvariants) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t problems = 1 + static_cast<std::size_t>(trial) % 7, solvers = 1 + static_cast<std::size_t>(trial) % 3;
    CostMatrix costs(problems, std::vector<std::optional<double>>(solvers));
    std::size_t finite_total = 0;
    for (auto& row : costs) {
      for (auto& v : row) {
        if (u(rng) > 20.0) {
          v = std::round(u(rng));
          ++finite_total;
        }
      }
    }
    std::vector<std::string> names;
    for (std::size_t s = 0; s < solvers; ++s) names.push_back("s" + std::to_string(s));
    const auto curves = performance_profile(costs, names);
    double sum_at_one = 0.0, sum_terminal = 0.0;
    for (const auto& c : curves) {
      expect_nondecreasing(c);
      sum_at_one += c.at(1.0);
      sum_terminal += c.breakpoints.back().second;
    }
    // terminal value is the solved fraction
    EXPECT_NEAR(sum_terminal, static_cast<double>(finite_total) / static_cast<double>(problems), 1e-12);
    std::size_t rows_with_success = 0;
    for (const auto& row : costs) rows_with_success += std::any_of(row.begin(), row.end(), [](auto& v) { return v.has_value(); });
    EXPECT_GE(sum_at_one + 1e-12, static_cast<double>(rows_with_success) / static_cast<double>(problems));
  }
}

TEST(Csv, RoundTripIsLossless) {
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<RunRecord> records;
  for (int k = 0; k < 40; ++k) {
    RunRecord r;
    r.solver = solver_names()[static_cast<std::size_t>(k) % 3];
    r.problem = "p" + std::to_string(k);
    r.n = k + 2;
    r.perm_index = k % 10;
    r.seed = rng();
    r.rhoend = std::pow(10.0, -1 - k % 6) * (1.0 + u(rng) * 1e-4);
    r.nf = 1 + k * 13;
    r.fbest = k == 3 ? std::numeric_limits<double>::infinity() : u(rng) / 3.0;
    r.status = static_cast<SolverStatus>(k % 4);
    records.push_back(r);
  }
  EXPECT_EQ(parse_csv(emit_csv(records)), records);
}

TEST(Csv, EmptyListIsHeaderOnly) {
  EXPECT_EQ(emit_csv({}), std::string(kRecordHeader) + "\n");
  EXPECT_TRUE(parse_csv(emit_csv({})).empty());
}

TEST(Csv, HandWrittenFixture) {
  const std::string text =
      "solver,problem,n,perm,seed,rhoend,nf,fbest,status\r\n"
      "esymbs,chrosen,6,0,12345,0.01,187,3.5e-05,converged\r\n"
      "symb,cosmix,8,9,18446744073709551615,0.0001,1000,-6.9999,maxfun\r\n";
  const auto records = parse_csv(text);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0], (RunRecord{"esymbs", "chrosen", 6, 0, 12345, 0.01, 187, 3.5e-05, SolverStatus::converged}));
  EXPECT_EQ(records[1], (RunRecord{"symb", "cosmix", 8, 9, 18446744073709551615ull, 1e-4, 1000, -6.9999,
                                   SolverStatus::maxfun}));
}

TEST(Csv, MalformedRowsNameTheLine) {
  const std::string header = std::string(kRecordHeader) + "\n";
  auto message = [](const std::string& text) {
    try {
      parse_csv(text);
    } catch (const CsvError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(header + "a,b,6,0,1,0.1,5,1.0,converged\na,b,six,0,1,0.1,5,1.0,converged\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(message(header + "a,b,6,0,1,0.1,5,1.0\n").find("line 2"), std::string::npos);
  EXPECT_NE(message(header + "a,b,6,0,1,0.1,5,1.0,finished\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("solver,problem\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("").find("header"), std::string::npos);
}

TEST(RunSuite, CardinalityAndOrder) {
  auto spec = small_suite();
  const auto records = run_suite(spec);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].perm_index, 0);
  EXPECT_EQ(records[1].perm_index, 1);
  for (const auto& r : records) {
    EXPECT_GE(r.nf, 1);
    EXPECT_EQ(r.seed, permutation_seed(spec.base_seed, "sphere", 6, r.perm_index));
    EXPECT_EQ(r.rhoend, 1e-4);
  }
}

TEST(RunSuite, DeterministicAcrossThreadCounts) {
  SuiteSpec spec;
  spec.solvers = {"symb", "esymbp"};
  spec.problems = {"arwhead", "chrosen"};
  spec.dims = {6};
  spec.perms = 3;
  spec.base_seed = 7;
  spec.config.rhoend = 1e-3;
  spec.threads = 1;
  const auto serial = emit_csv(run_suite(spec));
  spec.threads = 4;
  EXPECT_EQ(emit_csv(run_suite(spec)), serial);
  EXPECT_EQ(emit_csv(run_suite(spec)), serial);
}

TEST(RunSuite, SphereCostDoesNotDependOnPermutation) {
  auto spec = small_suite();
  spec.solvers = solver_names();
  spec.perms = 5;
  const auto records = run_suite(spec);
  for (const auto& r : records) {
    const auto first = std::find_if(records.begin(), records.end(), [&](const RunRecord& x) { return x.solver == r.solver; });
    EXPECT_EQ(r.nf, first->nf) << r.solver;
  }
}

TEST(RunSuite, SolversShareInstances) {
  SuiteSpec spec = small_suite();
  spec.solvers = {"esymbs", "symb"};
  const auto records = run_suite(spec);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].seed, records[2].seed);
  EXPECT_EQ(records[1].seed, records[3].seed);
  EXPECT_NE(records[0].seed, records[1].seed);
}

TEST(RunSuite, UnknownNamesAreRejected) {
  auto spec = small_suite();
  spec.solvers = {"newuoa"};
  EXPECT_THROW(run_suite(spec), UnknownSolverError);
  spec = small_suite();
  spec.problems = {"nosuch"};
  EXPECT_THROW(run_suite(spec), std::invalid_argument);
  spec = small_suite();
  spec.perms = 0;
  EXPECT_THROW(run_suite(spec), std::invalid_argument);
}

TEST(SolverRule, Names) {
  EXPECT_EQ(solver_rule("esymbs").kind, SigmaKind::geometric);
  EXPECT_EQ(solver_rule("esymbp", 4.0).kind, SigmaKind::eta_xi);
  EXPECT_EQ(solver_rule("esymbp", 4.0).M, 4.0);
  EXPECT_EQ(solver_rule("symb").fixed_value, 0.0);
  try {
    solver_rule("foo");
    FAIL();
  } catch (const UnknownSolverError& e) {
    EXPECT_EQ(e.name(), "foo");
  }
}

TEST(CostTable, FailedReplicaFailsInstance) {
  std::vector<RunRecord> records = {
      {"a", "sphere", 6, 0, 1, 1e-2, 100, 1e-9, SolverStatus::converged},
      {"a", "sphere", 6, 1, 2, 1e-2, 120, 1e-9, SolverStatus::converged},
      {"b", "sphere", 6, 0, 1, 1e-2, 80, 1e-9, SolverStatus::converged},
      {"b", "sphere", 6, 1, 2, 1e-2, 90, 1e-9, SolverStatus::maxfun},
      {"a", "cosmix", 6, 0, 1, 1e-2, 50, -4.0, SolverStatus::stalled},
      {"b", "cosmix", 6, 0, 1, 1e-2, 60, -4.0, SolverStatus::converged},
  };
  const auto table = build_cost_table(records, ProfileMetric::mean);
  EXPECT_EQ(table.solvers, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(table.instances, (std::vector<std::string>{"cosmix/6/0.01", "sphere/6/0.01"}));
  // cosmix has no known minimum, so only convergence counts
  EXPECT_FALSE(table.costs[0][0].has_value());
  EXPECT_EQ(table.costs[0][1], 60.0);
  EXPECT_EQ(table.costs[1][0], 110.0);
  EXPECT_FALSE(table.costs[1][1].has_value());

  const auto rstd = build_cost_table(records, ProfileMetric::rstd);
  EXPECT_NEAR(*rstd.costs[1][0], 10.0 / 110.0, 1e-15);
}

TEST(RunSolved, Thresholds) {
  RunRecord r{"a", "sphere", 6, 0, 1, 1e-2, 100, 9e-7, SolverStatus::converged};
  EXPECT_TRUE(run_solved(r));
  r.fbest = 2e-6;
  EXPECT_FALSE(run_solved(r));
  r.fbest = 0.0;
  r.status = SolverStatus::error;
  EXPECT_FALSE(run_solved(r));
}

TEST(ProfileOutput, CsvAndSvg) {
  const auto curves = performance_profile({{10.0, 20.0}, {30.0, 15.0}, {std::nullopt, 5.0}}, {"a", "b"});
  std::ostringstream csv;
  emit_profile_csv(csv, curves);
  EXPECT_EQ(csv.str(),
            "solver,tau,rho\n"
            "a,1,0.33333333333333331\n"
            "a,2,0.66666666666666663\n"
            "b,1,0.66666666666666663\n"
            "b,2,1\n");
  std::ostringstream svg;
  emit_profile_svg(svg, curves, "fixture");
  EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
  EXPECT_NE(svg.str().find("polyline"), std::string::npos);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}
