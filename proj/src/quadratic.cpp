#include "sobolev/quadratic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobolev {

namespace detail {
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

QuadraticModel::QuadraticModel(Vector base, double constant, Vector gradient, const Matrix& hessian)
    : base_(std::move(base)), constant_(constant), gradient_(std::move(gradient)) {
  const auto n = base_.size();
  if (n < 1) throw std::invalid_argument("QuadraticModel: dimension must be at least 1");
  detail::require_same_dim(gradient_.size(), n, "QuadraticModel gradient");
  if (hessian.rows() != n || hessian.cols() != n) {
    throw std::invalid_argument("QuadraticModel: Hessian must be n x n");
  }
  hessian_ = hessian.selfadjointView<Eigen::Lower>();
}

QuadraticModel QuadraticModel::zero(const Vector& base) {
  const auto n = base.size();
  return QuadraticModel(base, 0.0, Vector::Zero(n), Matrix::Zero(n, n));
}

double QuadraticModel::operator()(const Vector& x) const {
  detail::require_same_dim(x.size(), dim(), "evaluate");
  const Vector s = x - base_;
  return constant_ + gradient_.dot(s) + 0.5 * s.dot(hessian_ * s);
}

double evaluate(const QuadraticModel& q, const Vector& x) { return q(x); }

Vector gradient_at(const QuadraticModel& q, const Vector& x) {
  detail::require_same_dim(x.size(), q.dim(), "gradient_at");
  return q.gradient() + q.hessian() * (x - q.base());
}

QuadraticModel rebase(const QuadraticModel& q, const Vector& new_base) {
  detail::require_same_dim(new_base.size(), q.dim(), "rebase");
  return QuadraticModel(new_base, q(new_base), gradient_at(q, new_base), q.hessian());
}

QuadraticModel combine(double a, const QuadraticModel& q1, double b, const QuadraticModel& q2) {
  detail::require_same_dim(q1.dim(), q2.dim(), "combine");
  const Vector& base = q1.base();
  const double c2 = q2(base);
  const Vector g2 = gradient_at(q2, base);
  return QuadraticModel(base, a * q1.constant() + b * c2, a * q1.gradient() + b * g2,
                        a * q1.hessian() + b * q2.hessian());
}

Ball::Ball(Vector center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 1) throw std::invalid_argument("Ball: dimension must be at least 1");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw std::invalid_argument("Ball: radius must be positive and finite");
  }
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("unit_ball_volume: n must be at least 1");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double h1_seminorm_sq(const QuadraticModel& q, const Ball& ball) {
  detail::require_same_dim(q.dim(), ball.dim(), "h1_seminorm_sq");
  const auto n = static_cast<int>(q.dim());
  const double r = ball.radius();
  const double hess = q.hessian().squaredNorm();
  const double grad = gradient_at(q, ball.center()).squaredNorm();
  return unit_ball_volume(n) * std::pow(r, n) * (r * r / (n + 2) * hess + grad);
}

double h1_seminorm(const QuadraticModel& q, const Ball& ball) { return std::sqrt(h1_seminorm_sq(q, ball)); }

double h1_inner_product(const QuadraticModel& p, const QuadraticModel& q, const Ball& ball) {
  const double plus = h1_seminorm_sq(combine(1.0, p, 1.0, q), ball);
  const double minus = h1_seminorm_sq(combine(1.0, p, -1.0, q), ball);
  return 0.25 * (plus - minus);
}

double h1_seminorm_sq_quadrature(const QuadraticModel& q, const Ball& ball, int cells_per_axis) {
  detail::require_same_dim(q.dim(), ball.dim(), "h1_seminorm_sq_quadrature");
  const auto n = static_cast<int>(q.dim());
  if (n > 5) throw std::invalid_argument("h1_seminorm_sq_quadrature: n must be at most 5");
  if (cells_per_axis < 16) throw std::invalid_argument("h1_seminorm_sq_quadrature: need at least 16 cells per axis");

  const double r = ball.radius();
  const double h = 2.0 * r / cells_per_axis;
  const double r_sq = r * r;
  const Vector lower = ball.center().array() - r;

  // Gradient is affine: grad(x) = grad(center) + G (x - center).
  const Vector g0 = gradient_at(q, ball.center());
  const Matrix& G = q.hessian();

  std::vector<int> index(n, 0);
  Vector offset(n);
  double sum = 0.0;
  while (true) {
    for (int i = 0; i < n; ++i) offset[i] = lower[i] + (index[i] + 0.5) * h - ball.center()[i];
    if (offset.squaredNorm() <= r_sq) sum += (g0 + G * offset).squaredNorm();

    int axis = 0;
    while (axis < n && ++index[axis] == cells_per_axis) index[axis++] = 0;
    if (axis == n) break;
  }
  return sum * std::pow(h, n);
}

}  // namespace sobolev
