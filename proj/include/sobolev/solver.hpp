#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sobolev/interpolation.hpp"
#include "sobolev/update.hpp"

namespace sobolev {

using Objective = std::function<double(const Vector&)>;

struct SolverConfig {
  double rhobeg = 0.5;
  double rhoend = 1e-6;
  int maxfun = 1000;
  /// Interpolation point count; 0 selects 2n + 1.
  int npt = 0;
  SigmaRule sigma_rule = SigmaRule::geometric();
  std::uint64_t seed = 0;

  int resolved_npt(int n) const { return npt > 0 ? npt : 2 * n + 1; }
  /// Throws std::invalid_argument when the configuration is not usable in dimension n.
  void validate(int n) const;
};

enum class SolverStatus { converged, maxfun, stalled, error };

std::string_view to_string(SolverStatus status);
/// Inverse of to_string; throws std::invalid_argument on unknown names.
SolverStatus parse_status(std::string_view name);

struct SolverReport {
  Vector best_point;
  double best_value = 0.0;
  int nf = 0;
  SolverStatus status = SolverStatus::error;
  std::vector<std::pair<int, double>> history;  ///< (nf, best value so far) after every evaluation
  std::string message;
};

/// x, x + Delta e_i, x - Delta e_i; for npt < 2n + 1 the trailing negative steps are dropped.
InterpolationSet initial_point_set(const Vector& xhat, double rhobeg, int npt);

/**
 * Truncated conjugate gradients (Steihaug-Toint) on the model about `center`,
 * restricted to |d| <= radius. Stops on the boundary at negative curvature.
 */
Vector trust_region_subproblem(const QuadraticModel& q, const Vector& center, double radius);

/**
 * Index of the point to drop for `new_point`: maximizes
 * |l_j(new_point)| * max(1, |y_j - center|^4 / radius^4), never the point with
 * the least value. The choice is verified to keep the system nonsingular;
 * otherwise the farthest point, then the remaining ones, are tried.
 */
std::size_t select_replacement_point(const InterpolationSet& set, const Vector& x0, double sigma,
                                     const Vector& new_point, const Vector& tr_center, double tr_radius);

/// Point on the sphere |p - center| = radius along +-grad l(center), whichever gives larger |l|.
Vector geometry_step_point(const QuadraticModel& lagrange, const Vector& center, double radius);

/// As above with l the Lagrange function of set.points[worst_index].
Vector geometry_step_point(const InterpolationSet& set, const Vector& x0, double sigma, std::size_t worst_index,
                           const Vector& tr_center, double tr_radius);

/// Called after every model update with the current set and model; used by tests.
using UpdateObserver = std::function<void(const InterpolationSet&, const QuadraticModel&)>;

SolverReport minimize(const Objective& f, const Vector& xhat, const SolverConfig& config,
                      const UpdateObserver& observer = {});

}  // namespace sobolev
