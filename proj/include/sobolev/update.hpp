#pragma once

#include <optional>

#include "sobolev/interpolation.hpp"
#include "sobolev/quadratic.hpp"

namespace sobolev {

enum class SigmaKind {
  geometric,  // ball of radius max(M * Delta, max |y - xbar|) about the trust-region center
  eta_xi,     // ratio of the curvature and slope of the new point's Lagrange function
  fixed,
};

struct SigmaRule {
  SigmaKind kind = SigmaKind::geometric;
  double M = 10.0;
  std::optional<double> fixed_value;

  static SigmaRule geometric(double M = 10.0) { return {SigmaKind::geometric, M, std::nullopt}; }
  static SigmaRule eta_xi(double M = 10.0) { return {SigmaKind::eta_xi, M, std::nullopt}; }
  static SigmaRule fixed(double sigma) { return {SigmaKind::fixed, 10.0, sigma}; }

  void validate() const;
};

struct UpdateContext {
  Vector tr_center;
  double tr_radius = 1.0;
  InterpolationSet set;  ///< points and objective values F(y_j)
  QuadraticModel prior;  ///< the model being updated
  /// Index of the point at which `prior` fails to interpolate, when known.
  std::optional<std::size_t> new_index;

  void validate() const;
};

struct SigmaChoice {
  Vector x0;
  double sigma = 0.0;
  /// Radius of the ball whose H1 seminorm the update minimizes (inf when sigma = 0).
  double radius = 0.0;
};

/// x0 = xbar, r = max(M Delta, max_j |y_j - xbar|), sigma = (n + 2) / r^2.
SigmaChoice sigma_geometric(const UpdateContext& ctx, double M);

inline constexpr double kEtaXiFloor = 1e-12;
inline constexpr double kSigmaMin = 1e-12;
inline constexpr double kSigmaMax = 1e12;

/// eta / xi with eta = |hess l|_F^2 and xi = max(|grad l(x0)|^2, 1e-12), clamped to [1e-12, 1e12].
double eta_xi_ratio(const QuadraticModel& lagrange, const Vector& x0);

/**
 * Surrogate of the eta/xi rule: computes the Lagrange function of the new
 * point with `provisional_sigma` and returns eta_xi_ratio of it at xbar. When
 * ctx.new_index is unset, the point with the largest residual F - Q0 is used.
 */
double sigma_eta_xi(const UpdateContext& ctx, double provisional_sigma);

/// (x0, sigma) the rule selects in this context.
SigmaChoice choose_sigma(const UpdateContext& ctx, const SigmaRule& rule);

/// Index of the point where the prior misses F by the most.
std::size_t largest_residual_index(const UpdateContext& ctx);

/**
 * Extended symmetric Broyden update: Q+ = Q0 + D where D is the least-norm
 * interpolant of the residuals F(y_j) - Q0(y_j) with (x0, sigma) from the rule.
 * The result is expanded about x0.
 */
QuadraticModel esb_update(const UpdateContext& ctx, const SigmaRule& rule);

/// As esb_update, with (x0, sigma) already chosen.
QuadraticModel esb_update(const UpdateContext& ctx, const SigmaChoice& choice);

/**
 * | |Q+ - F|^2 - |Q0 - F|^2 + |Q+ - Q0|^2 | / (1 + |Q0 - F|^2) in H1(ball).
 * Zero up to rounding when Q+ is the update of Q0 and F is quadratic.
 */
double pythagorean_residual(const QuadraticModel& q0, const QuadraticModel& q_plus, const QuadraticModel& f,
                            const Ball& ball);

}  // namespace sobolev
