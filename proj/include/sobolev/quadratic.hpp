#pragma once

#include <Eigen/Dense>

namespace sobolev {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * A quadratic polynomial stored as an expansion about a base point:
 *
 *   Q(x) = c + g'(x - base) + 1/2 (x - base)' G (x - base).
 *
 * Only the lower triangle of the Hessian handed to the constructor is read;
 * it is mirrored into the upper triangle, so G is exactly symmetric.
 */
class QuadraticModel {
 public:
  QuadraticModel(Vector base, double constant, Vector gradient, const Matrix& hessian);

  /// The zero polynomial expanded about `base`.
  static QuadraticModel zero(const Vector& base);

  Eigen::Index dim() const { return base_.size(); }
  const Vector& base() const { return base_; }
  double constant() const { return constant_; }
  const Vector& gradient() const { return gradient_; }
  const Matrix& hessian() const { return hessian_; }

  double operator()(const Vector& x) const;

 private:
  Vector base_;
  double constant_;
  Vector gradient_;
  Matrix hessian_;
};

double evaluate(const QuadraticModel& q, const Vector& x);
Vector gradient_at(const QuadraticModel& q, const Vector& x);

/// Same function, expanded about `new_base`.
QuadraticModel rebase(const QuadraticModel& q, const Vector& new_base);

/// a*q1 + b*q2, expanded about q1.base().
QuadraticModel combine(double a, const QuadraticModel& q1, double b, const QuadraticModel& q2);

/// Closed ball {x : |x - center| <= radius}.
class Ball {
 public:
  Ball(Vector center, double radius);

  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  Eigen::Index dim() const { return center_.size(); }

 private:
  Vector center_;
  double radius_;
};

/// Volume of the unit ball in R^n, pi^(n/2) / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/**
 * Squared H1 seminorm of a quadratic over a ball, in closed form:
 *
 *   |Q|^2 = V_n r^n [ r^2/(n+2) |G|_F^2 + |grad Q(center)|^2 ].
 *
 * The model need not be expanded about the ball center.
 */
double h1_seminorm_sq(const QuadraticModel& q, const Ball& ball);
double h1_seminorm(const QuadraticModel& q, const Ball& ball);

/// H1(ball) inner product of two quadratics, by polarization of h1_seminorm_sq.
double h1_inner_product(const QuadraticModel& p, const QuadraticModel& q, const Ball& ball);

/**
 * Midpoint-rule approximation of the squared seminorm: the bounding box of the
 * ball is split into cells_per_axis^n cells and |grad Q|^2 is summed over the
 * cells whose centers lie in the ball. Used as an independent check of the
 * closed form, so it is restricted to n <= 5 and cells_per_axis >= 16.
 */
double h1_seminorm_sq_quadrature(const QuadraticModel& q, const Ball& ball, int cells_per_axis);

namespace detail {
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);
}  // namespace detail

}  // namespace sobolev
