#include "sobolev/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace sobolev {

void SolverConfig::validate(int n) const {
  if (n < 1) throw std::invalid_argument("SolverConfig: dimension must be at least 1");
  if (!(rhoend > 0.0) || !(rhoend <= rhobeg) || !std::isfinite(rhobeg)) {
    throw std::invalid_argument("SolverConfig: need 0 < rhoend <= rhobeg");
  }
  const int m = resolved_npt(n);
  if (m < n + 2 || m > (n + 1) * (n + 2) / 2) {
    throw std::invalid_argument("SolverConfig: npt must lie in [n + 2, (n + 1)(n + 2)/2]");
  }
  if (maxfun < m) throw std::invalid_argument("SolverConfig: maxfun must be at least npt");
  sigma_rule.validate();
}

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::maxfun: return "maxfun";
    case SolverStatus::stalled: return "stalled";
    case SolverStatus::error: return "error";
  }
  return "error";
}

SolverStatus parse_status(std::string_view name) {
  for (auto s : {SolverStatus::converged, SolverStatus::maxfun, SolverStatus::stalled, SolverStatus::error}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown solver status '" + std::string(name) + "'");
}

InterpolationSet initial_point_set(const Vector& xhat, double rhobeg, int npt) {
  const auto n = static_cast<int>(xhat.size());
  if (n < 1) throw std::invalid_argument("initial_point_set: empty starting point");
  if (!(rhobeg > 0.0)) throw std::invalid_argument("initial_point_set: rhobeg must be positive");
  if (npt < n + 2 || npt > (n + 1) * (n + 2) / 2) {
    throw std::invalid_argument("initial_point_set: npt " + std::to_string(npt) + " outside [" +
                                std::to_string(n + 2) + ", " + std::to_string((n + 1) * (n + 2) / 2) + "]");
  }
  InterpolationSet set;
  set.points.push_back(xhat);
  for (int i = 0; i < n; ++i) set.points.push_back(xhat + rhobeg * Vector::Unit(n, i));
  for (int i = 0; i < n && static_cast<int>(set.points.size()) < npt; ++i) {
    set.points.push_back(xhat - rhobeg * Vector::Unit(n, i));
  }
  // Beyond 2n + 1 points, add x + Delta (e_p + e_q) for p < q in order.
  for (int p = 0; p < n && static_cast<int>(set.points.size()) < npt; ++p) {
    for (int q = p + 1; q < n && static_cast<int>(set.points.size()) < npt; ++q) {
      set.points.push_back(xhat + rhobeg * (Vector::Unit(n, p) + Vector::Unit(n, q)));
    }
  }
  set.values.assign(set.points.size(), std::numeric_limits<double>::quiet_NaN());
  return set;
}

namespace {

// tau >= 0 with |d + tau p| = radius, for |d| <= radius.
double step_to_boundary(const Vector& d, const Vector& p, double radius) {
  const double a = p.squaredNorm();
  const double b = 2.0 * d.dot(p);
  const double c = std::min(d.squaredNorm() - radius * radius, 0.0);
  const double root = std::sqrt(b * b - 4.0 * a * c);
  return b > 0.0 ? -2.0 * c / (b + root) : (root - b) / (2.0 * a);
}

}  // namespace

Vector trust_region_subproblem(const QuadraticModel& q, const Vector& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("trust_region_subproblem: radius must be positive");
  const auto n = q.dim();
  const Vector g = gradient_at(q, center);
  const Matrix& hess = q.hessian();
  Vector d = Vector::Zero(n);
  const double gnorm = g.norm();
  if (gnorm == 0.0) return d;

  Vector r = -g;
  Vector p = r;
  double rr = r.squaredNorm();
  for (Eigen::Index iter = 0; iter < n; ++iter) {
    const Vector hp = hess * p;
    const double curvature = p.dot(hp);
    if (curvature <= 0.0) return d + step_to_boundary(d, p, radius) * p;
    const double alpha = rr / curvature;
    if ((d + alpha * p).norm() >= radius) return d + step_to_boundary(d, p, radius) * p;
    d += alpha * p;
    r -= alpha * hp;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= 1e-12 * gnorm) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return d;
}

namespace {

std::size_t argmin_value(const InterpolationSet& set) {
  return static_cast<std::size_t>(std::min_element(set.values.begin(), set.values.end()) - set.values.begin());
}

bool replacement_is_nonsingular(const InterpolationSet& set, std::size_t index, const Vector& new_point,
                                const Vector& x0, double sigma) {
  std::vector<Vector> points = set.points;
  points[index] = new_point;
  try {
    return LeastNormSystem(std::move(points), x0, sigma).full_rank();
  } catch (const InterpolationError&) {
    return false;
  }
}

}  // namespace

std::size_t select_replacement_point(const InterpolationSet& set, const Vector& x0, double sigma,
                                     const Vector& new_point, const Vector& tr_center, double tr_radius) {
  set.validate();
  detail::require_same_dim(new_point.size(), set.dim(), "select_replacement_point");
  if (!(tr_radius > 0.0)) throw std::invalid_argument("select_replacement_point: radius must be positive");
  const std::size_t best = argmin_value(set);
  const auto lagrange = lagrange_functions(set.points, x0, sigma);

  std::vector<double> score(set.size(), -1.0);
  std::vector<double> dist(set.size(), 0.0);
  for (std::size_t j = 0; j < set.size(); ++j) {
    dist[j] = (set.points[j] - tr_center).norm();
    if (j == best) continue;
    const double ratio = dist[j] / tr_radius;
    score[j] = std::abs(lagrange[j](new_point)) * std::max(1.0, ratio * ratio * ratio * ratio);
  }

  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  order.erase(order.begin() + static_cast<std::ptrdiff_t>(best));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  if (order.empty()) throw GeometryFailure("no replaceable interpolation point");

  if (replacement_is_nonsingular(set, order.front(), new_point, x0, sigma)) return order.front();
  const auto farthest = *std::max_element(order.begin(), order.end(),
                                          [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  if (replacement_is_nonsingular(set, farthest, new_point, x0, sigma)) return farthest;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (order[k] != farthest && replacement_is_nonsingular(set, order[k], new_point, x0, sigma)) return order[k];
  }
  throw GeometryFailure("every replacement leaves the interpolation system singular");
}

Vector geometry_step_point(const QuadraticModel& lagrange, const Vector& center, double radius) {
  detail::require_same_dim(center.size(), lagrange.dim(), "geometry_step_point");
  if (!(radius > 0.0)) throw std::invalid_argument("geometry_step_point: radius must be positive");
  const Vector grad = gradient_at(lagrange, center);
  const double gnorm = grad.norm();
  if (gnorm > 0.0 && std::isfinite(gnorm)) {
    const Vector plus = center + (radius / gnorm) * grad;
    const Vector minus = center - (radius / gnorm) * grad;
    return std::abs(lagrange(plus)) >= std::abs(lagrange(minus)) ? plus : minus;
  }
  // Flat at the center: best signed coordinate direction.
  const auto n = center.size();
  Vector best = center + radius * Vector::Unit(n, 0);
  double best_value = std::abs(lagrange(best));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      const Vector cand = center + sign * radius * Vector::Unit(n, i);
      const double v = std::abs(lagrange(cand));
      if (v > best_value) {
        best_value = v;
        best = cand;
      }
    }
  }
  return best;
}

Vector geometry_step_point(const InterpolationSet& set, const Vector& x0, double sigma, std::size_t worst_index,
                           const Vector& tr_center, double tr_radius) {
  set.validate();
  if (worst_index >= set.size()) throw std::invalid_argument("geometry_step_point: index out of range");
  const LeastNormSystem system(set.points, x0, sigma);
  std::vector<double> delta(set.size(), 0.0);
  delta[worst_index] = 1.0;
  return geometry_step_point(system.solve(delta), tr_center, tr_radius);
}

namespace {

constexpr double kShortStepFactor = 0.5;
constexpr double kRatioLow = 0.1;
constexpr double kRatioHigh = 0.7;
constexpr double kRhoDivisor = 10.0;

struct Stop {
  SolverStatus status;
  std::string message;
};

class TrustRegionRun {
 public:
  TrustRegionRun(const Objective& f, const SolverConfig& config, const UpdateObserver& observer, int n)
      : f_(f), config_(config), observer_(observer), n_(n) {}

  SolverReport run(const Vector& xhat) {
    try {
      const auto stop = iterate(xhat);
      report_.status = stop.status;
      report_.message = stop.message;
    } catch (const InterpolationError& e) {
      report_.status = SolverStatus::error;
      report_.message = e.what();
    }
    return report_;
  }

 private:
  // Evaluates F at x; returns nullopt when the value is not finite.
  std::optional<double> evaluate(const Vector& x) {
    const double v = f_(x);
    ++report_.nf;
    if (!std::isfinite(v)) return std::nullopt;
    if (report_.nf == 1 || v < report_.best_value) {
      report_.best_value = v;
      report_.best_point = x;
    }
    report_.history.emplace_back(report_.nf, report_.best_value);
    return v;
  }

  bool budget_left() const { return report_.nf < config_.maxfun; }

  const Vector& xopt() const { return set_.points[kopt_]; }

  void update_model(const QuadraticModel& prior, std::optional<std::size_t> new_index) {
    UpdateContext ctx{xopt(), delta_, set_, prior, new_index};
    const SigmaChoice choice = choose_sigma(ctx, config_.sigma_rule);
    sigma_ = choice.sigma;
    model_ = esb_update(ctx, choice);
    if (observer_) observer_(set_, *model_);
  }

  // Replaces point k with x (value fx) and updates the model.
  void replace(std::size_t k, const Vector& x, double fx) {
    set_.points[k] = x;
    set_.values[k] = fx;
    if (fx < set_.values[kopt_]) kopt_ = k;
    update_model(*model_, k);
  }

  std::optional<std::size_t> far_point(double threshold) const {
    std::optional<std::size_t> far;
    double worst = threshold;
    for (std::size_t j = 0; j < set_.size(); ++j) {
      const double d = (set_.points[j] - xopt()).norm();
      if (d > worst) {
        worst = d;
        far = j;
      }
    }
    return far;
  }

  // Moves point k next to xopt. Returns a stop reason when the budget or F fails.
  std::optional<Stop> geometry_step(std::size_t k) {
    if (!budget_left()) return Stop{SolverStatus::maxfun, "evaluation budget exhausted"};
    const double dist = (set_.points[k] - xopt()).norm();
    const double step = std::max(std::min(0.1 * dist, 0.5 * delta_), rho_);
    const Vector x = geometry_step_point(set_, xopt(), sigma_, k, xopt(), step);
    const auto fx = evaluate(x);
    if (!fx) return Stop{SolverStatus::error, "objective returned a non-finite value"};
    replace(k, x, *fx);
    return std::nullopt;
  }

  Stop iterate(const Vector& xhat) {
    set_ = initial_point_set(xhat, config_.rhobeg, config_.resolved_npt(n_));
    for (std::size_t j = 0; j < set_.size(); ++j) {
      if (!budget_left()) return {SolverStatus::maxfun, "evaluation budget exhausted during initialization"};
      const auto v = evaluate(set_.points[j]);
      if (!v) return {SolverStatus::error, "objective returned a non-finite value"};
      set_.values[j] = *v;
    }
    kopt_ = argmin_value(set_);
    rho_ = config_.rhobeg;
    delta_ = config_.rhobeg;
    update_model(QuadraticModel::zero(xopt()), std::nullopt);

    int idle = 0;  // iterations at rho = rhoend without a new best value
    double last_best = report_.best_value;
    while (true) {
      if (rho_ <= config_.rhoend) {
        if (report_.best_value < last_best) {
          idle = 0;
        } else if (++idle >= 5 * n_) {
          return {SolverStatus::stalled, "no progress at the final trust-region radius"};
        }
      }
      last_best = report_.best_value;

      if (!budget_left()) return {SolverStatus::maxfun, "evaluation budget exhausted"};
      const Vector base = xopt();
      const Vector d = trust_region_subproblem(*model_, base, delta_);
      const double dnorm = d.norm();

      if (dnorm < kShortStepFactor * rho_) {
        delta_ = rho_;
        if (const auto k = far_point(2.0 * delta_)) {
          if (auto stop = geometry_step(*k)) return *stop;
          continue;
        }
        if (rho_ <= config_.rhoend) return {SolverStatus::converged, "final trust-region radius reached"};
        reduce_rho();
        continue;
      }

      const Vector x = base + d;
      const double fopt = set_.values[kopt_];
      const double predicted = (*model_)(base) - (*model_)(x);
      const auto fx = evaluate(x);
      if (!fx) return {SolverStatus::error, "objective returned a non-finite value"};
      const double ratio = predicted > 0.0 ? (fopt - *fx) / predicted : -1.0;

      if (ratio <= kRatioLow) {
        delta_ *= 0.5;
      } else if (ratio > kRatioHigh) {
        delta_ = std::max(delta_, 2.0 * dnorm);
      }
      delta_ = std::max(delta_, rho_);

      const std::size_t k = select_replacement_point(set_, base, sigma_, x, base, delta_);
      replace(k, x, *fx);
      if (ratio > kRatioLow) continue;

      if (const auto far = far_point(2.0 * delta_)) {
        if (auto stop = geometry_step(*far)) return *stop;
        continue;
      }
      if (delta_ > rho_) continue;
      if (rho_ <= config_.rhoend) return {SolverStatus::converged, "final trust-region radius reached"};
      reduce_rho();
    }
  }

  void reduce_rho() {
    const double next = std::max(rho_ / kRhoDivisor, config_.rhoend);
    delta_ = std::max(0.5 * rho_, next);
    rho_ = next;
  }

  const Objective& f_;
  const SolverConfig& config_;
  const UpdateObserver& observer_;
  int n_;

  SolverReport report_;
  InterpolationSet set_;
  std::size_t kopt_ = 0;
  std::optional<QuadraticModel> model_;
  double rho_ = 0.0;
  double delta_ = 0.0;
  double sigma_ = 0.0;
};

}  // namespace

SolverReport minimize(const Objective& f, const Vector& xhat, const SolverConfig& config,
                      const UpdateObserver& observer) {
  const auto n = static_cast<int>(xhat.size());
  config.validate(n);
  TrustRegionRun run(f, config, observer, n);
  return run.run(xhat);
}

}  // namespace sobolev
