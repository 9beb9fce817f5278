#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sobolev/errors.hpp"
#include "sobolev/quadratic.hpp"

namespace sobolev {

/// Interpolation points y_0..y_m with data f(y_0)..f(y_m).
struct InterpolationSet {
  std::vector<Vector> points;
  std::vector<double> values;

  Eigen::Index dim() const { return points.empty() ? 0 : points.front().size(); }
  std::size_t size() const { return points.size(); }

  /// Throws std::invalid_argument on empty sets, ragged dimensions or a value count mismatch.
  void validate() const;
};

/**
 * Parameters of the least-norm problem
 *
 *   min |hess(Q - Q0)|_F^2 + sigma |grad(Q - Q0)(x0)|^2   s.t.  Q(y_j) = f_j,
 *
 * with Q0 = 0 when no prior is given. sigma = 0 selects the bilevel problem
 * (least Frobenius norm first, then least gradient norm at x0).
 */
struct LeastNormSpec {
  Vector x0;
  double sigma = 0.0;
  std::optional<QuadraticModel> prior;
};

struct PoisednessReport {
  int linear_rank = 0;
  /// Reciprocal condition estimate of the sigma = 0 KKT matrix, inverted (inf when singular).
  double kkt_condition = 0.0;
  bool poised_linear = false;
};

inline constexpr double kDistinctTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kSingularTolerance = 1e-12;

/// Throws DuplicatePointsError when two points are closer than 1e-10 * (1 + max |y|).
void require_distinct(const std::vector<Vector>& points);

/// Rank of L = (1/r)(y_1 - y_0, ..., y_m - y_0) with r = max |y_j - y_0|.
PoisednessReport check_poisedness(const InterpolationSet& set);

/**
 * A factorized least-norm problem for fixed points, x0 and sigma. Solving
 * for several right-hand sides (Lagrange functions, repeated updates) reuses
 * one factorization.
 *
 * Internally the displacements y_j - x0 are scaled to unit size; sigma is
 * rescaled to match, so the computed model is unchanged.
 */
class LeastNormSystem {
 public:
  LeastNormSystem(std::vector<Vector> points, Vector x0, double sigma);
  ~LeastNormSystem();
  LeastNormSystem(LeastNormSystem&&) noexcept;
  LeastNormSystem& operator=(LeastNormSystem&&) noexcept;

  /// The model of least norm interpolating `data`, expanded about x0.
  QuadraticModel solve(const std::vector<double>& data) const;

  bool full_rank() const;
  std::size_t size() const { return points_.size(); }
  const Vector& x0() const { return x0_; }
  double sigma() const { return sigma_; }

 private:
  struct Factorization;

  std::vector<Vector> points_;
  Vector x0_;
  double sigma_;
  std::unique_ptr<Factorization> factorization_;
};

/// Least-norm interpolation, solved in the null space of the interpolation conditions.
QuadraticModel solve_p1(const InterpolationSet& set, const LeastNormSpec& spec);

/**
 * Reference solution of the same problem by a dense null-space method in the
 * monomial coefficient space; sigma = 0 is solved literally as two nested
 * minimizations. Desk scale only (n <= 6, at most 28 points).
 */
QuadraticModel brute_force_p1(const InterpolationSet& set, const LeastNormSpec& spec);

/// l_0..l_m with l_i(y_j) = delta_ij, each the least-norm solution for Kronecker data.
std::vector<QuadraticModel> lagrange_functions(const std::vector<Vector>& points, const Vector& x0, double sigma);

/**
 * Checks that the sigma > 0 solution is H1-optimal over B(x0, sqrt((n+2)/sigma)):
 * returns max_k |<Q, D_k>| / (|Q| |D_k|) over an orthonormal basis D_k of the
 * quadratics vanishing on the points. Zero when there is no freedom left.
 */
double verify_equivalence_theorem(const InterpolationSet& set, const Vector& x0, double sigma);

double sigma_to_radius(double sigma, int n);
double radius_to_sigma(double radius, int n);

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

/**
 * Samples points of B(y_0, r) and checks the Taylor-type error bounds of a
 * quadratic interpolant with nu-Lipschitz gradient:
 *
 *   |grad Q - grad F| <= 5 sqrt(m)/2 |L^+| (nu + |hess Q|_2) r
 *   |Q - F|           <= (5 sqrt(m)/2 |L^+| + 1/2) (nu + |hess Q|_2) r^2
 *
 * Returns true iff every sampled inequality holds.
 */
bool verify_csv_error_bounds(const ScalarField& f, const VectorField& grad_f, const InterpolationSet& set,
                             const QuadraticModel& q, double nu, double radius, int samples,
                             std::uint64_t seed = 0);

namespace detail {

/// Number of monomials of degree <= 2 in n variables.
inline int quadratic_dimension(int n) { return (n + 1) * (n + 2) / 2; }

/// Row of the interpolation matrix for displacement s in the basis [1, s_i, s_i^2/2, s_i s_j (i<j)].
Vector monomial_row(const Vector& s);

/// Coefficient vector of q in the monomial basis about x0.
Vector coefficients(const QuadraticModel& q, const Vector& x0);

QuadraticModel model_from_coefficients(const Vector& coef, const Vector& x0);

}  // namespace detail

}  // namespace sobolev
