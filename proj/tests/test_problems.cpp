#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sobolev/problems.hpp"

using namespace sobolev;

namespace {

Vector probe(int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = 0.3 + 0.1 * i;
  return x;
}

}  // namespace

TEST(Problems, NamesAndMinimumDimensions) {
  const std::vector<std::string> expected = {"sphere", "chrosen", "arwhead", "dqrtic",
                                             "vardim", "bdqrtic", "sumpow",  "cosmix"};
  EXPECT_EQ(problem_names(), expected);
  EXPECT_EQ(minimum_dimension("bdqrtic"), 5);
  EXPECT_EQ(minimum_dimension("sphere"), 2);
  EXPECT_THROW(instantiate("bdqrtic", 4), std::invalid_argument);
  EXPECT_THROW(instantiate("sphere", 1), std::invalid_argument);
  try {
    instantiate("nosuch", 6);
    FAIL() << "expected UnknownProblemError";
  } catch (const UnknownProblemError& e) {
    EXPECT_EQ(e.name(), "nosuch");
    EXPECT_NE(std::string(e.what()).find("nosuch"), std::string::npos);
  }
}

TEST(Problems, HandValues) {
  EXPECT_EQ(instantiate("chrosen", 5).objective(Vector::Ones(5)), 0.0);
  EXPECT_DOUBLE_EQ(instantiate("chrosen", 3).objective(Vector::Constant(3, -1.0)), 40.0);
  EXPECT_DOUBLE_EQ(instantiate("arwhead", 3).objective(Vector::Ones(3)), 6.0);
}

// Reference values from tests/oracles/derive.py at x_i = 0.3 + 0.1 i, n = 6.
TEST(Problems, ProbeValues) {
  const std::vector<std::pair<std::string, double>> expected = {
      {"sphere", 1.99},          {"chrosen", 1.2096},         {"arwhead", 9.2419},
      {"dqrtic", 1252.5315},     {"vardim", 3575.9841},       {"bdqrtic", 86.45},
      {"sumpow", 4.4233},        {"cosmix", 4.1156631229530127},
  };
  for (const auto& [name, value] : expected) {
    EXPECT_NEAR(instantiate(name, 6).objective(probe(6)), value, 1e-13 * std::max(1.0, value)) << name;
  }
}

TEST(Problems, StartsAndMinima) {
  const auto vardim = instantiate("vardim", 4);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(vardim.start[i], 1.0 - (i + 1) / 4.0);
  EXPECT_EQ(instantiate("chrosen", 6).start, Vector::Constant(6, -1.0));
  EXPECT_EQ(instantiate("dqrtic", 6).start, Vector::Constant(6, 2.0));
  EXPECT_FALSE(instantiate("bdqrtic", 6).known_fmin.has_value());
  EXPECT_FALSE(instantiate("cosmix", 6).known_fmin.has_value());
  EXPECT_EQ(instantiate("sumpow", 6).known_fmin, 0.0);

  Vector dq(5);
  for (int i = 0; i < 5; ++i) dq[i] = i + 1.0;
  EXPECT_EQ(instantiate("dqrtic", 5).objective(dq), 0.0);
  EXPECT_EQ(instantiate("arwhead", 5).objective((Vector(5) << 1, 1, 1, 1, 0).finished()), 0.0);
}

TEST(Problems, FiniteNearStart) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> normal;
  for (const auto& name : problem_names()) {
    const auto p = instantiate(name, 8);
    for (int k = 0; k < 20; ++k) {
      Vector d(8);
      for (auto& v : d) v = normal(rng);
      const Vector x = p.start + 10.0 * std::uniform_real_distribution<double>(0, 1)(rng) * d.normalized();
      const double fx = p.objective(x);
      EXPECT_TRUE(std::isfinite(fx)) << name;
      if (p.known_fmin) {
        EXPECT_GE(fx, *p.known_fmin - 1e-12) << name;
      }
    }
  }
}

TEST(Permutation, GoldenValues) {
  EXPECT_EQ(random_permutation(6, 1).perm, (std::vector<int>{2, 1, 0, 4, 5, 3}));
  EXPECT_EQ(random_permutation(10, 42).perm, (std::vector<int>{9, 2, 0, 7, 5, 8, 3, 6, 1, 4}));
}

TEST(Permutation, DeterministicBijection) {
  for (std::uint64_t seed : {0ull, 1ull, 7ull, 0x9E3779B97F4A7C15ull, ~0ull}) {
    for (int n : {1, 2, 6, 17}) {
      const auto p = random_permutation(n, seed);
      EXPECT_EQ(p.perm, random_permutation(n, seed).perm);
      EXPECT_EQ(p.seed, seed);
      auto sorted = p.perm;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> iota(static_cast<std::size_t>(n));
      std::iota(iota.begin(), iota.end(), 0);
      EXPECT_EQ(sorted, iota);
    }
  }
  EXPECT_THROW(random_permutation(0, 1), std::invalid_argument);
}

TEST(Permutation, ApplyAndInverse) {
  const auto p = random_permutation(6, 3);
  const Vector x = probe(6);
  const Vector y = p.apply(x);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(y[i], x[p.perm[static_cast<std::size_t>(i)]]);
  EXPECT_EQ(p.apply(p.apply_inverse(x)), x);
  EXPECT_EQ(p.inverse().apply(p.apply(x)), x);
  EXPECT_THROW(p.apply(Vector::Zero(5)), std::invalid_argument);
}

TEST(PermuteProblem, Identity) {
  const auto base = instantiate("chrosen", 6);
  const Permutation id{{0, 1, 2, 3, 4, 5}, 0};
  const auto same = permute_problem(base, id);
  EXPECT_EQ(same.start, base.start);
  EXPECT_EQ(same.objective(probe(6)), base.objective(probe(6)));
}

TEST(PermuteProblem, SphereIsSymmetric) {
  const auto base = instantiate("sphere", 6);
  const auto perm = permute_problem(base, random_permutation(6, 9));
  EXPECT_EQ(perm.objective(probe(6)), base.objective(probe(6)));
}

TEST(PermuteProblem, StartValuesAgree) {
  for (const auto& name : problem_names()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto base = instantiate(name, 8);
      const auto perm = permute_problem(base, random_permutation(8, seed));
      // F(P P^-1 x) evaluates the same sums in the same order
      EXPECT_EQ(perm.objective(perm.start), base.objective(base.start)) << name;
    }
  }
  EXPECT_THROW(permute_problem(instantiate("sphere", 6), random_permutation(5, 1)), std::invalid_argument);
}

TEST(PermuteProblem, RoundTripRestoresValues) {
  const auto base = instantiate("vardim", 6);
  const auto p = random_permutation(6, 4);
  const auto there_and_back = permute_problem(permute_problem(base, p), p.inverse());
  EXPECT_EQ(there_and_back.objective(probe(6)), base.objective(probe(6)));
  EXPECT_EQ(there_and_back.start, base.start);
}

TEST(Xorshift, ZeroStateIsAvoided) {
  Xorshift64Star rng(0x9E3779B97F4A7C15ull);
  EXPECT_NE(rng.next(), 0u);
}
