#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sobolev/solver.hpp"

namespace sobolev {

struct ProblemDef {
  std::string name;
  int n = 0;
  Objective objective;
  Vector start;
  std::optional<double> known_fmin;
};

class UnknownProblemError : public std::invalid_argument {
 public:
  explicit UnknownProblemError(std::string name)
      : std::invalid_argument("unknown problem '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Lowercase names of the built-in suite, in a fixed order.
const std::vector<std::string>& problem_names();

/// Smallest dimension the named problem accepts.
int minimum_dimension(std::string_view name);

/**
 * Builds one of the suite problems (sphere, chrosen, arwhead, dqrtic, vardim,
 * bdqrtic, sumpow, cosmix) in dimension n. Sums run over ascending indices,
 * except for sphere, whose terms are added smallest first.
 */
ProblemDef instantiate(std::string_view name, int n);

/// xorshift64* generator; the state is seeded with seed ^ 0x9E3779B97F4A7C15.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

struct Permutation {
  std::vector<int> perm;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(perm.size()); }
  Permutation inverse() const;
  /// (P x)_i = x_perm[i].
  Vector apply(const Vector& x) const;
  /// P^{-1} x, so that apply(apply_inverse(x)) == x.
  Vector apply_inverse(const Vector& x) const;
};

/// Fisher-Yates shuffle of 0..n-1 (i from n-1 down to 1, j = next() % (i + 1)).
Permutation random_permutation(int n, std::uint64_t seed);

/// F_P(x) = F(P x) started from P^{-1} xhat.
ProblemDef permute_problem(const ProblemDef& problem, const Permutation& perm);

}  // namespace sobolev
