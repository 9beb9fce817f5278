#include "sobolev/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace sobolev {

namespace {

double max_point_norm(const std::vector<Vector>& points) {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.norm());
  return m;
}

void require_consistent_dims(const std::vector<Vector>& points, Eigen::Index n, const char* what) {
  for (const auto& p : points) detail::require_same_dim(p.size(), n, what);
}

// KKT matrix of the scaled sigma = 0 least-norm problem. Rows are
//   sum_k lambda_k A_jk + c + g's_j = d_j,   sum lambda = 0,   S'lambda = 0
// with A_jk = (s_j's_k)^2 / 4.
Matrix build_kkt(const Matrix& s) {
  const auto m = s.cols();
  const auto n = s.rows();
  const Matrix gram = s.transpose() * s;
  Matrix k = Matrix::Zero(m + 1 + n, m + 1 + n);
  k.topLeftCorner(m, m) = 0.25 * gram.array().square().matrix();
  k.block(0, m, m, 1).setOnes();
  k.block(m, 0, 1, m).setOnes();
  k.block(0, m + 1, m, n) = s.transpose();
  k.block(m + 1, 0, n, m) = s;
  return k;
}

}  // namespace

void InterpolationSet::validate() const {
  if (points.empty()) throw std::invalid_argument("InterpolationSet: no points");
  if (values.size() != points.size()) {
    throw std::invalid_argument("InterpolationSet: " + std::to_string(values.size()) + " values for " +
                                std::to_string(points.size()) + " points");
  }
  const auto n = points.front().size();
  if (n < 1) throw std::invalid_argument("InterpolationSet: zero-dimensional points");
  require_consistent_dims(points, n, "InterpolationSet");
}

void require_distinct(const std::vector<Vector>& points) {
  const double tol = kDistinctTolerance * (1.0 + max_point_norm(points));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if ((points[i] - points[j]).norm() <= tol) {
        throw DuplicatePointsError("interpolation points " + std::to_string(i) + " and " + std::to_string(j) +
                                   " coincide");
      }
    }
  }
}

PoisednessReport check_poisedness(const InterpolationSet& set) {
  set.validate();
  if (set.size() < 2) throw std::invalid_argument("check_poisedness: need at least two points");
  require_distinct(set.points);

  const auto n = set.dim();
  const auto m = static_cast<Eigen::Index>(set.size()) - 1;
  Matrix l(n, m);
  for (Eigen::Index j = 0; j < m; ++j) l.col(j) = set.points[j + 1] - set.points[0];
  const double r = l.colwise().norm().maxCoeff();
  l /= r;

  Eigen::JacobiSVD<Matrix> svd(l);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTolerance * sv[0]) ++rank;
  }

  // Condition of the sigma = 0 system about y_0, with displacements scaled as in LeastNormSystem.
  Matrix s(n, m + 1);
  s.col(0).setZero();
  s.rightCols(m) = l;
  Eigen::PartialPivLU<Matrix> lu(build_kkt(s));
  const double rcond = lu.rcond();

  PoisednessReport report;
  report.linear_rank = rank;
  report.poised_linear = rank == n;
  report.kkt_condition = rcond > 0.0 && std::isfinite(rcond) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  return report;
}

// The least-norm problem in scaled monomial coordinates: minimize |W^1/2 x|
// subject to M x = d. x = x_p + Z t with x_p a particular solution from a QR
// factorization of M' and Z a basis of its null space; t is then a plain
// least-squares problem in W^1/2 Z. Nothing gets squared, so this holds up when
// the interpolation matrix is poorly conditioned or sigma is large.
struct LeastNormSystem::Factorization {
  Matrix scaled;  // displacements (y_j - x0) / scale, one per column
  double scale = 1.0;
  double sigma_hat = 0.0;
  Matrix rows;    // monomial rows of the scaled points
  Eigen::ColPivHouseholderQR<Matrix> constraints;  // of rows'
  Eigen::Index rank = 0;
  Matrix null_basis;
  Vector root_weight;
  Eigen::ColPivHouseholderQR<Matrix> weighted;  // of diag(root_weight) null_basis
  bool unique = false;
};

LeastNormSystem::LeastNormSystem(std::vector<Vector> points, Vector x0, double sigma)
    : points_(std::move(points)), x0_(std::move(x0)), sigma_(sigma) {
  if (points_.empty()) throw std::invalid_argument("LeastNormSystem: no interpolation points");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("LeastNormSystem: sigma must be finite and nonnegative");
  }
  const auto n = x0_.size();
  require_consistent_dims(points_, n, "LeastNormSystem");
  require_distinct(points_);

  if (sigma_ == 0.0) {
    if (points_.size() < 2) throw NotPoisedError("sigma = 0 needs linearly poised points; got a single point");
    InterpolationSet probe{points_, std::vector<double>(points_.size(), 0.0)};
    const auto report = check_poisedness(probe);
    if (!report.poised_linear) {
      throw NotPoisedError("sigma = 0 needs linearly poised points; linear rank is " +
                           std::to_string(report.linear_rank) + " < " + std::to_string(n));
    }
  }

  auto f = std::make_unique<Factorization>();
  const auto m = static_cast<Eigen::Index>(points_.size());
  const Eigen::Index p = detail::quadratic_dimension(static_cast<int>(n));
  f->scaled.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j) f->scaled.col(j) = points_[j] - x0_;
  const double h = f->scaled.colwise().norm().maxCoeff();
  f->scale = h > 0.0 ? h : 1.0;
  f->scaled /= f->scale;
  f->sigma_hat = sigma_ * f->scale * f->scale;

  f->rows.resize(m, p);
  for (Eigen::Index j = 0; j < m; ++j) f->rows.row(j) = detail::monomial_row(f->scaled.col(j)).transpose();
  f->constraints.setThreshold(kSingularTolerance);
  f->constraints.compute(f->rows.transpose());
  f->rank = f->constraints.rank();
  const Matrix q = f->constraints.householderQ();
  f->null_basis = q.rightCols(p - f->rank);

  // |G|_F^2 + sigma |g|^2 counts each off-diagonal entry twice.
  f->root_weight = Vector::Zero(p);
  f->root_weight.segment(1, n).setConstant(std::sqrt(f->sigma_hat));
  f->root_weight.segment(1 + n, n).setOnes();
  f->root_weight.tail(p - 1 - 2 * n).setConstant(std::sqrt(2.0));
  if (f->null_basis.cols() > 0) {
    f->weighted.setThreshold(kSingularTolerance);
    f->weighted.compute(f->root_weight.asDiagonal() * f->null_basis);
    f->unique = f->weighted.rank() == f->null_basis.cols();
  } else {
    f->unique = true;
  }
  factorization_ = std::move(f);
}

LeastNormSystem::~LeastNormSystem() = default;
LeastNormSystem::LeastNormSystem(LeastNormSystem&&) noexcept = default;
LeastNormSystem& LeastNormSystem::operator=(LeastNormSystem&&) noexcept = default;

bool LeastNormSystem::full_rank() const {
  return factorization_->rank == static_cast<Eigen::Index>(points_.size()) && factorization_->unique;
}

QuadraticModel LeastNormSystem::solve(const std::vector<double>& data) const {
  const auto& f = *factorization_;
  const auto m = static_cast<Eigen::Index>(points_.size());
  const auto n = x0_.size();
  if (static_cast<Eigen::Index>(data.size()) != m) {
    throw std::invalid_argument("LeastNormSystem::solve: expected " + std::to_string(m) + " data values, got " +
                                std::to_string(data.size()));
  }
  if (!f.unique) throw NotPoisedError("least-norm problem has no unique solution for these interpolation points");
  const Vector d = Eigen::Map<const Vector>(data.data(), m);

  // M' P = Q R, so the first r equations of P'M x = P'd read R11' (Q1'x) = (P'd)_1..r.
  const Eigen::Index r = f.rank;
  const Vector permuted = f.constraints.colsPermutation().transpose() * d;
  const Matrix r11 = f.constraints.matrixR().topLeftCorner(r, r);
  Vector u = Vector::Zero(f.rows.cols());
  u.head(r) = r11.transpose().triangularView<Eigen::Lower>().solve(permuted.head(r));
  Vector x = f.constraints.householderQ() * u;
  if (f.null_basis.cols() > 0) {
    x += f.null_basis * f.weighted.solve(-(f.root_weight.cwiseProduct(x))).eval();
  }

  if (r < m) {
    const double resid = (f.rows * x - d).cwiseAbs().maxCoeff();
    if (!(resid <= 1e-9 * (1.0 + d.cwiseAbs().maxCoeff()))) {
      if (m > f.rows.cols()) {
        throw InconsistentError("no quadratic interpolates the data on " + std::to_string(m) + " points in R^" +
                                std::to_string(n));
      }
      throw NotPoisedError("interpolation constraints are rank deficient and inconsistent");
    }
  }

  QuadraticModel scaled_model = detail::model_from_coefficients(x, Vector::Zero(n));
  return QuadraticModel(x0_, scaled_model.constant(), scaled_model.gradient() / f.scale,
                        scaled_model.hessian() / (f.scale * f.scale));
}

QuadraticModel solve_p1(const InterpolationSet& set, const LeastNormSpec& spec) {
  set.validate();
  detail::require_same_dim(spec.x0.size(), set.dim(), "solve_p1");
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("solve_p1: sigma must be nonnegative");
  if (spec.prior) detail::require_same_dim(spec.prior->dim(), set.dim(), "solve_p1 prior");

  std::vector<double> data = set.values;
  if (spec.prior) {
    for (std::size_t j = 0; j < data.size(); ++j) data[j] -= (*spec.prior)(set.points[j]);
  }
  const LeastNormSystem system(set.points, spec.x0, spec.sigma);
  QuadraticModel change = system.solve(data);
  if (!spec.prior) return change;
  return combine(1.0, change, 1.0, *spec.prior);
}

std::vector<QuadraticModel> lagrange_functions(const std::vector<Vector>& points, const Vector& x0, double sigma) {
  const LeastNormSystem system(points, x0, sigma);
  std::vector<QuadraticModel> out;
  out.reserve(points.size());
  std::vector<double> delta(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    delta[i] = 1.0;
    out.push_back(system.solve(delta));
    delta[i] = 0.0;
  }
  return out;
}

namespace detail {

Vector monomial_row(const Vector& s) {
  const auto n = s.size();
  Vector row(quadratic_dimension(static_cast<int>(n)));
  row[0] = 1.0;
  row.segment(1, n) = s;
  row.segment(1 + n, n) = 0.5 * s.array().square();
  Eigen::Index k = 1 + 2 * n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) row[k++] = s[i] * s[j];
  }
  return row;
}

Vector coefficients(const QuadraticModel& q, const Vector& x0) {
  const auto n = q.dim();
  const QuadraticModel r = rebase(q, x0);
  Vector coef(quadratic_dimension(static_cast<int>(n)));
  coef[0] = r.constant();
  coef.segment(1, n) = r.gradient();
  coef.segment(1 + n, n) = r.hessian().diagonal();
  Eigen::Index k = 1 + 2 * n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) coef[k++] = r.hessian()(i, j);
  }
  return coef;
}

QuadraticModel model_from_coefficients(const Vector& coef, const Vector& x0) {
  const auto n = x0.size();
  detail::require_same_dim(coef.size(), quadratic_dimension(static_cast<int>(n)), "model_from_coefficients");
  Matrix g2 = coef.segment(1 + n, n).asDiagonal();
  Eigen::Index k = 1 + 2 * n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g2(i, j) = coef[k];
      g2(j, i) = coef[k];
      ++k;
    }
  }
  return QuadraticModel(x0, coef[0], coef.segment(1, n), g2);
}

}  // namespace detail

namespace {

// Minimize (p + Z z)' W (p + Z z) over z. Moves p to a minimizer and shrinks Z
// to the directions along which the objective is flat.
void minimize_on_affine_set(Vector& p, Matrix& z, const Vector& weights) {
  if (z.cols() == 0) return;
  const Matrix h = z.transpose() * weights.asDiagonal() * z;
  const Vector b = z.transpose() * (weights.asDiagonal() * p);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Vector& ev = eig.eigenvalues();
  const Matrix& u = eig.eigenvectors();
  const double tol = 1e-11 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);

  Vector step = Vector::Zero(z.cols());
  std::vector<Eigen::Index> flat;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > tol) {
      step -= u.col(i) * (u.col(i).dot(b) / ev[i]);
    } else {
      flat.push_back(i);
    }
  }
  p += z * step;
  Matrix remaining(z.rows(), static_cast<Eigen::Index>(flat.size()));
  for (std::size_t k = 0; k < flat.size(); ++k) remaining.col(k) = z * u.col(flat[k]);
  z = remaining;
}

}  // namespace

QuadraticModel brute_force_p1(const InterpolationSet& set, const LeastNormSpec& spec) {
  set.validate();
  const auto n = set.dim();
  detail::require_same_dim(spec.x0.size(), n, "brute_force_p1");
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("brute_force_p1: sigma must be nonnegative");
  if (n > 6 || set.size() > 28) throw std::invalid_argument("brute_force_p1: desk scale only (n <= 6, <= 28 points)");
  require_distinct(set.points);
  if (spec.sigma == 0.0) {
    if (set.size() < 2 || !check_poisedness(set).poised_linear) {
      throw NotPoisedError("sigma = 0 needs linearly poised points");
    }
  }

  const int p = detail::quadratic_dimension(static_cast<int>(n));
  const auto m = static_cast<Eigen::Index>(set.size());
  Matrix a(m, p);
  Vector d(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    a.row(j) = detail::monomial_row(set.points[j] - spec.x0).transpose();
    d[j] = set.values[j] - (spec.prior ? (*spec.prior)(set.points[j]) : 0.0);
  }

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTolerance * sv[0]) ++rank;
  }
  Vector coef = Vector::Zero(p);
  for (Eigen::Index i = 0; i < rank; ++i) coef += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(d) / sv[i]);
  if ((a * coef - d).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + d.cwiseAbs().maxCoeff())) {
    if (m > p) throw InconsistentError("no quadratic interpolates the data");
    throw NotPoisedError("interpolation constraints are rank deficient and inconsistent");
  }
  Matrix null_basis = svd.matrixV().rightCols(p - rank);

  // Weights of |hess|_F^2 and |grad|^2 in the monomial basis [c, g_i, G_ii, G_ij (i<j)].
  Vector hessian_weight = Vector::Zero(p);
  hessian_weight.segment(1 + n, n).setOnes();
  hessian_weight.tail(p - 1 - 2 * n).setConstant(2.0);
  Vector gradient_weight = Vector::Zero(p);
  gradient_weight.segment(1, n).setOnes();

  if (spec.sigma > 0.0) {
    minimize_on_affine_set(coef, null_basis, hessian_weight + spec.sigma * gradient_weight);
  } else {
    minimize_on_affine_set(coef, null_basis, hessian_weight);
    minimize_on_affine_set(coef, null_basis, gradient_weight);
  }
  if (null_basis.cols() > 0) throw NotPoisedError("least-norm interpolant is not unique");

  QuadraticModel change = detail::model_from_coefficients(coef, spec.x0);
  if (!spec.prior) return change;
  return combine(1.0, change, 1.0, *spec.prior);
}

double sigma_to_radius(double sigma, int n) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma_to_radius: sigma must be positive");
  if (n < 1) throw std::invalid_argument("sigma_to_radius: n must be positive");
  return std::sqrt((n + 2) / sigma);
}

double radius_to_sigma(double radius, int n) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius_to_sigma: radius must be positive");
  if (n < 1) throw std::invalid_argument("radius_to_sigma: n must be positive");
  return (n + 2) / (radius * radius);
}

double verify_equivalence_theorem(const InterpolationSet& set, const Vector& x0, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("verify_equivalence_theorem: sigma must be positive");
  const QuadraticModel q = solve_p1(set, LeastNormSpec{x0, sigma, std::nullopt});
  const auto n = set.dim();
  const Ball ball(x0, sigma_to_radius(sigma, static_cast<int>(n)));

  const int p = detail::quadratic_dimension(static_cast<int>(n));
  const auto m = static_cast<Eigen::Index>(set.size());
  Matrix a(m, p);
  for (Eigen::Index j = 0; j < m; ++j) a.row(j) = detail::monomial_row(set.points[j] - x0).transpose();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTolerance * sv[0]) ++rank;
  }
  if (rank == p) return 0.0;

  const double q_norm = h1_seminorm(q, ball);
  if (q_norm == 0.0) return 0.0;
  const QuadraticModel q_unit = combine(1.0 / q_norm, q, 0.0, q);

  double worst = 0.0;
  for (Eigen::Index k = rank; k < p; ++k) {
    const QuadraticModel dir = detail::model_from_coefficients(svd.matrixV().col(k), x0);
    const double d_norm = h1_seminorm(dir, ball);
    if (d_norm == 0.0) continue;
    const QuadraticModel d_unit = combine(1.0 / d_norm, dir, 0.0, dir);
    worst = std::max(worst, std::abs(h1_inner_product(q_unit, d_unit, ball)));
  }
  return worst;
}

bool verify_csv_error_bounds(const ScalarField& f, const VectorField& grad_f, const InterpolationSet& set,
                             const QuadraticModel& q, double nu, double radius, int samples, std::uint64_t seed) {
  set.validate();
  const auto n = set.dim();
  detail::require_same_dim(q.dim(), n, "verify_csv_error_bounds");
  if (!(radius > 0.0) || !(nu >= 0.0) || samples < 1) {
    throw std::invalid_argument("verify_csv_error_bounds: need radius > 0, nu >= 0 and samples >= 1");
  }
  const Vector& y0 = set.points.front();
  for (const auto& y : set.points) {
    if ((y - y0).norm() > radius * (1.0 + 1e-12)) {
      throw std::invalid_argument("verify_csv_error_bounds: interpolation set is not inside B(y0, r)");
    }
  }
  const auto m = static_cast<Eigen::Index>(set.size()) - 1;
  if (m < n) throw NotPoisedError("error bounds need at least n + 1 points");

  Matrix l(n, m);
  for (Eigen::Index j = 0; j < m; ++j) l.col(j) = (set.points[j + 1] - y0) / radius;
  Eigen::JacobiSVD<Matrix> svd(l);
  const auto& sv = svd.singularValues();
  if (!(sv[n - 1] > kRankTolerance * sv[0])) throw NotPoisedError("matrix L does not have full row rank");
  const double pinv_norm = 1.0 / sv[n - 1];

  Eigen::SelfAdjointEigenSolver<Matrix> eig(q.hessian(), Eigen::EigenvaluesOnly);
  const double hess_norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double kappa = 2.5 * std::sqrt(static_cast<double>(m)) * pinv_norm;
  const double grad_bound = kappa * (nu + hess_norm) * radius;
  const double value_bound = (kappa + 0.5) * (nu + hess_norm) * radius * radius;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  for (int k = 0; k < samples; ++k) {
    Vector dir(n);
    for (Eigen::Index i = 0; i < n; ++i) dir[i] = normal(rng);
    const double len = dir.norm();
    if (len == 0.0) continue;
    const Vector x = y0 + dir * (radius * std::pow(uniform(rng), 1.0 / static_cast<double>(n)) / len);
    if ((gradient_at(q, x) - grad_f(x)).norm() > grad_bound) return false;
    if (std::abs(q(x) - f(x)) > value_bound) return false;
  }
  return true;
}

}  // namespace sobolev
