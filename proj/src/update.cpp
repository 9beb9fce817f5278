#include "sobolev/update.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sobolev {

void SigmaRule::validate() const {
  if (!(M >= 1.0)) throw std::invalid_argument("SigmaRule: M must be at least 1");
  if (kind == SigmaKind::fixed) {
    if (!fixed_value || !(*fixed_value >= 0.0) || !std::isfinite(*fixed_value)) {
      throw std::invalid_argument("SigmaRule: fixed rule needs a finite nonnegative value");
    }
  }
}

void UpdateContext::validate() const {
  set.validate();
  detail::require_same_dim(tr_center.size(), set.dim(), "UpdateContext trust-region center");
  detail::require_same_dim(prior.dim(), set.dim(), "UpdateContext prior");
  if (!(tr_radius > 0.0)) throw std::invalid_argument("UpdateContext: trust-region radius must be positive");
  if (new_index && *new_index >= set.size()) throw std::invalid_argument("UpdateContext: new_index out of range");
}

SigmaChoice sigma_geometric(const UpdateContext& ctx, double M) {
  ctx.validate();
  if (!(M >= 1.0)) throw std::invalid_argument("sigma_geometric: M must be at least 1");
  double r = M * ctx.tr_radius;
  for (const auto& y : ctx.set.points) r = std::max(r, (y - ctx.tr_center).norm());
  return {ctx.tr_center, radius_to_sigma(r, static_cast<int>(ctx.set.dim())), r};
}

double eta_xi_ratio(const QuadraticModel& lagrange, const Vector& x0) {
  const double eta = lagrange.hessian().squaredNorm();
  const double xi = std::max(gradient_at(lagrange, x0).squaredNorm(), kEtaXiFloor);
  return std::clamp(eta / xi, kSigmaMin, kSigmaMax);
}

std::size_t largest_residual_index(const UpdateContext& ctx) {
  std::size_t best = 0;
  double worst = -1.0;
  for (std::size_t j = 0; j < ctx.set.size(); ++j) {
    const double r = std::abs(ctx.set.values[j] - ctx.prior(ctx.set.points[j]));
    if (r > worst) {
      worst = r;
      best = j;
    }
  }
  return best;
}

double sigma_eta_xi(const UpdateContext& ctx, double provisional_sigma) {
  ctx.validate();
  const std::size_t k = ctx.new_index ? *ctx.new_index : largest_residual_index(ctx);
  const LeastNormSystem system(ctx.set.points, ctx.tr_center, provisional_sigma);
  std::vector<double> delta(ctx.set.size(), 0.0);
  delta[k] = 1.0;
  return eta_xi_ratio(system.solve(delta), ctx.tr_center);
}

SigmaChoice choose_sigma(const UpdateContext& ctx, const SigmaRule& rule) {
  rule.validate();
  switch (rule.kind) {
    case SigmaKind::geometric:
      return sigma_geometric(ctx, rule.M);
    case SigmaKind::eta_xi: {
      // The geometric choice serves as the provisional sigma for the Lagrange function.
      const SigmaChoice provisional = sigma_geometric(ctx, rule.M);
      const double sigma = sigma_eta_xi(ctx, provisional.sigma);
      return {ctx.tr_center, sigma, sigma_to_radius(sigma, static_cast<int>(ctx.set.dim()))};
    }
    case SigmaKind::fixed: {
      ctx.validate();
      const double sigma = *rule.fixed_value;
      const double r = sigma > 0.0 ? sigma_to_radius(sigma, static_cast<int>(ctx.set.dim()))
                                   : std::numeric_limits<double>::infinity();
      return {ctx.tr_center, sigma, r};
    }
  }
  throw std::logic_error("choose_sigma: unknown rule");
}

QuadraticModel esb_update(const UpdateContext& ctx, const SigmaChoice& choice) {
  ctx.validate();
  return solve_p1(ctx.set, LeastNormSpec{choice.x0, choice.sigma, ctx.prior});
}

QuadraticModel esb_update(const UpdateContext& ctx, const SigmaRule& rule) {
  return esb_update(ctx, choose_sigma(ctx, rule));
}

double pythagorean_residual(const QuadraticModel& q0, const QuadraticModel& q_plus, const QuadraticModel& f,
                            const Ball& ball) {
  const double after = h1_seminorm_sq(combine(1.0, q_plus, -1.0, f), ball);
  const double before = h1_seminorm_sq(combine(1.0, q0, -1.0, f), ball);
  const double change = h1_seminorm_sq(combine(1.0, q_plus, -1.0, q0), ball);
  return std::abs(after - before + change) / (1.0 + before);
}

}  // namespace sobolev
