#include "sobolev/problems.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace sobolev {

namespace {

// Squares are summed smallest first, an order that does not depend on how the
// variables are numbered, so permuted copies agree bit for bit.
double sphere(const Vector& x) {
  std::vector<double> sq(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) sq[static_cast<std::size_t>(i)] = x[i] * x[i];
  std::sort(sq.begin(), sq.end());
  double s = 0.0;
  for (double v : sq) s += v;
  return s;
}

double chrosen(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    const double a = x[i - 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 4.0 * a * a + b * b;
  }
  return s;
}

double arwhead(const Vector& x) {
  const auto n = x.size();
  const double last = x[n - 1] * x[n - 1];
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double t = x[i] * x[i] + last;
    s += t * t - 4.0 * x[i] + 3.0;
  }
  return s;
}

double dqrtic(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = x[i] - static_cast<double>(i + 1);
    s += t * t * t * t;
  }
  return s;
}

double vardim(const Vector& x) {
  double squares = 0.0;
  double weighted = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = x[i] - 1.0;
    squares += t * t;
    weighted += static_cast<double>(i + 1) * t;
  }
  const double w2 = weighted * weighted;
  return squares + w2 + w2 * w2;
}

double bdqrtic(const Vector& x) {
  const auto n = x.size();
  const double last = x[n - 1] * x[n - 1];
  double s = 0.0;
  for (Eigen::Index i = 0; i + 4 < n; ++i) {
    const double a = -4.0 * x[i] + 3.0;
    const double b = x[i] * x[i] + 2.0 * x[i + 1] * x[i + 1] + 3.0 * x[i + 2] * x[i + 2] +
                     4.0 * x[i + 3] * x[i + 3] + 5.0 * last;
    s += a * a + b * b;
  }
  return s;
}

double sumpow(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = x[i] * x[i];
    s += static_cast<double>(i + 1) * t * t;
  }
  return s;
}

double cosmix(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) s += std::cos(-0.5 * x[i + 1] - x[i] * x[i]);
  return s;
}

struct SuiteEntry {
  std::string_view name;
  int min_n;
  double (*objective)(const Vector&);
  std::optional<double> fmin;
};

constexpr double kZeroMin = 0.0;

const std::vector<SuiteEntry>& suite() {
  static const std::vector<SuiteEntry> entries = {
      {"sphere", 2, &sphere, kZeroMin},  {"chrosen", 2, &chrosen, kZeroMin},     {"arwhead", 2, &arwhead, kZeroMin},
      {"dqrtic", 2, &dqrtic, kZeroMin},  {"vardim", 2, &vardim, kZeroMin},       {"bdqrtic", 5, &bdqrtic, std::nullopt},
      {"sumpow", 2, &sumpow, kZeroMin},  {"cosmix", 2, &cosmix, std::nullopt},
  };
  return entries;
}

const SuiteEntry& lookup(std::string_view name) {
  for (const auto& e : suite()) {
    if (e.name == name) return e;
  }
  throw UnknownProblemError(std::string(name));
}

Vector start_point(std::string_view name, int n) {
  if (name == "chrosen") return Vector::Constant(n, -1.0);
  if (name == "dqrtic") return Vector::Constant(n, 2.0);
  if (name == "vardim") {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = 1.0 - static_cast<double>(i + 1) / n;
    return x;
  }
  return Vector::Ones(n);
}

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : suite()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

int minimum_dimension(std::string_view name) { return lookup(name).min_n; }

ProblemDef instantiate(std::string_view name, int n) {
  const auto& entry = lookup(name);
  if (n < entry.min_n) {
    throw std::invalid_argument("problem '" + std::string(name) + "' needs n >= " + std::to_string(entry.min_n) +
                                ", got " + std::to_string(n));
  }
  return ProblemDef{std::string(entry.name), n, entry.objective, start_point(name, n), entry.fmin};
}

Xorshift64Star::Xorshift64Star(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ULL) {
  // The all-zero state is a fixed point of xorshift.
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Xorshift64Star::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 2685821657736338717ULL;
}

Permutation Permutation::inverse() const {
  Permutation inv{std::vector<int>(perm.size()), seed};
  for (std::size_t i = 0; i < perm.size(); ++i) inv.perm[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

Vector Permutation::apply(const Vector& x) const {
  detail::require_same_dim(x.size(), size(), "Permutation::apply");
  Vector y(x.size());
  for (int i = 0; i < size(); ++i) y[i] = x[perm[static_cast<std::size_t>(i)]];
  return y;
}

Vector Permutation::apply_inverse(const Vector& x) const {
  detail::require_same_dim(x.size(), size(), "Permutation::apply_inverse");
  Vector y(x.size());
  for (int i = 0; i < size(); ++i) y[perm[static_cast<std::size_t>(i)]] = x[i];
  return y;
}

Permutation random_permutation(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_permutation: n must be positive");
  Permutation p{std::vector<int>(static_cast<std::size_t>(n)), seed};
  for (int i = 0; i < n; ++i) p.perm[static_cast<std::size_t>(i)] = i;
  Xorshift64Star rng(seed);
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % static_cast<std::uint64_t>(i + 1));
    std::swap(p.perm[static_cast<std::size_t>(i)], p.perm[j]);
  }
  return p;
}

ProblemDef permute_problem(const ProblemDef& problem, const Permutation& perm) {
  if (perm.size() != problem.n) {
    throw std::invalid_argument("permute_problem: permutation of size " + std::to_string(perm.size()) +
                                " for a problem of dimension " + std::to_string(problem.n));
  }
  ProblemDef out = problem;
  out.objective = [f = problem.objective, perm](const Vector& x) { return f(perm.apply(x)); };
  out.start = perm.apply_inverse(problem.start);
  return out;
}

}  // namespace sobolev
