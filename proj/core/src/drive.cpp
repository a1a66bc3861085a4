#include "driveiv/drive.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "driveiv/errors.hpp"
#include "driveiv/projection.hpp"

namespace driveiv {

namespace {

double penalty_exponent(double q_order) { return q_order / (q_order - 1.0); }

SqrtQuadratic projected_quadratic(const ProjectedDesign& design) {
  const double n = static_cast<double>(design.n());
  SqrtQuadratic quad;
  quad.a = design.x_proj.transpose() * design.x_proj / n;
  quad.b = design.x_proj.transpose() * design.y_proj / n;
  quad.c = design.y_proj.squaredNorm() / n;
  return quad;
}

Estimate solve_to_estimate(const SqrtQuadratic& quad, double rho, double pbar,
                           const Eigen::VectorXd& warm,
                           const SolverSettings& settings, EstimatorKind kind) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(warm.size());
  const SolverResult res =
      minimize_sqrt_quadratic(quad, rho, pbar, zero, warm, settings);
  if (!res.converged)
    throw SolverDidNotConverge("solver did not reach gradient tolerance after " +
                               std::to_string(res.iterations) + " iterations");
  Estimate est;
  est.beta = res.x;
  est.kind = kind;
  est.rho = rho;
  est.diagnostics.iterations = res.iterations;
  est.diagnostics.gradient_norm = res.gradient_norm;
  est.diagnostics.objective = res.objective;
  if (res.at_kink) est.diagnostics.warnings.push_back("interpolation_point");
  return est;
}

}  // namespace

void validate_drive_spec(const DriveSpec& spec) {
  if (!(spec.rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  if (!(spec.q_order > 1.0 && spec.q_order <= 2.0))
    throw ValidationError("q_order must lie in (1, 2]");
  validate_solver_settings(spec.solver);
}

MomentSystem iv_moment_system(const IVDataset& data) {
  validate_dataset(data);
  const double n = static_cast<double>(data.n());
  MomentSystem sys;
  sys.jacobian = data.z.transpose() * data.x / n;
  sys.moment0 = data.z.transpose() * data.y / n;
  const Eigen::MatrixXd sigma_z = data.z.transpose() * data.z / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_z);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NonPositiveWeight("z'z/n is not positive definite");
  sys.weight = es.operatorInverseSqrt() * es.operatorInverseSqrt();
  return sys;
}

MomentSystem ols_moment_system(const IVDataset& data) {
  validate_dataset(data);
  const double n = static_cast<double>(data.n());
  MomentSystem sys;
  sys.jacobian = data.x.transpose() * data.x / n;
  sys.moment0 = data.x.transpose() * data.y / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.jacobian);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NonPositiveWeight("x'x/n is not positive definite");
  sys.weight = es.operatorInverseSqrt() * es.operatorInverseSqrt();
  return sys;
}

double drive_objective(const Eigen::VectorXd& beta,
                       const ProjectedDesign& design, const DriveSpec& spec) {
  validate_drive_spec(spec);
  if (beta.size() != design.n_endogenous())
    throw DimensionMismatch("beta length does not match design");
  const double n = static_cast<double>(design.n());
  const double loss =
      (design.y_proj - design.x_proj * beta).squaredNorm() / n;
  const double pbar = penalty_exponent(spec.q_order);
  const double penalty =
      std::pow(spec.rho * (std::pow(beta.norm(), pbar) + 1.0), 1.0 / pbar);
  return std::sqrt(loss) + penalty;
}

Estimate fit_drive(const ProjectedDesign& design, const DriveSpec& spec) {
  validate_drive_spec(spec);
  const SqrtQuadratic quad = projected_quadratic(design);
  // Warm start at TSLS (the rho = 0 minimizer).
  Eigen::VectorXd warm = quad.a.ldlt().solve(quad.b);
  if (!warm.allFinite()) warm = Eigen::VectorXd::Zero(design.n_endogenous());
  return solve_to_estimate(quad, spec.rho, penalty_exponent(spec.q_order),
                           warm, spec.solver, EstimatorKind::Drive);
}

Eigen::VectorXd solve_population_limit(const PopulationLimit& limit,
                                       const SolverSettings& settings) {
  if (!(limit.rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  if (limit.gram.rows() != limit.gram.cols() ||
      limit.gram.rows() != limit.beta0.size())
    throw DimensionMismatch("gram and beta0 dimensions do not match");
  if (!limit.gram.isApprox(limit.gram.transpose(), 1e-10))
    throw ValidationError("gram must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(limit.gram);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw ValidationError("gram must be positive semidefinite");

  SqrtQuadratic quad;
  quad.a = limit.gram;
  quad.b = limit.gram * limit.beta0;
  quad.c = limit.beta0.dot(quad.b);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(limit.beta0.size());
  const SolverResult res = minimize_sqrt_quadratic(quad, limit.rho, 2.0, zero,
                                                   limit.beta0, settings);
  if (!res.converged)
    throw SolverDidNotConverge("population-limit solver did not converge");
  return res.x;
}

Estimate fit_sqrt_ridge_gmm(const MomentSystem& moments, const DriveSpec& spec) {
  validate_drive_spec(spec);
  const Eigen::Index k = moments.moment0.size();
  if (moments.jacobian.rows() != k || moments.weight.rows() != k ||
      moments.weight.cols() != k)
    throw DimensionMismatch("moment system dimensions do not match");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moments.weight);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NonPositiveWeight("weight matrix is not positive definite");

  // gbar(theta)' W gbar(theta) with gbar = moment0 - jacobian theta.
  SqrtQuadratic quad;
  quad.a = moments.jacobian.transpose() * moments.weight * moments.jacobian;
  quad.b = moments.jacobian.transpose() * moments.weight * moments.moment0;
  quad.c = moments.moment0.dot(moments.weight * moments.moment0);
  Eigen::VectorXd warm = quad.a.ldlt().solve(quad.b);
  if (!warm.allFinite())
    warm = Eigen::VectorXd::Zero(moments.jacobian.cols());
  return solve_to_estimate(quad, spec.rho, penalty_exponent(spec.q_order),
                           warm, spec.solver, EstimatorKind::SqrtRidgeGmm);
}

std::vector<std::pair<double, Eigen::VectorXd>> drive_shrinkage_path(
    const ProjectedDesign& design, const std::vector<double>& rho_grid,
    double q_order, const SolverSettings& settings) {
  if (rho_grid.empty()) throw ValidationError("rho grid must be nonempty");
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (rho_grid[i] < 0.0 || (i > 0 && rho_grid[i] <= rho_grid[i - 1]))
      throw ValidationError("rho grid must be sorted, increasing, nonnegative");
  }
  const SqrtQuadratic quad = projected_quadratic(design);
  const double pbar = penalty_exponent(q_order);
  DriveSpec probe;
  probe.q_order = q_order;
  probe.solver = settings;
  validate_drive_spec(probe);

  Eigen::VectorXd warm = quad.a.ldlt().solve(quad.b);
  if (!warm.allFinite()) warm = Eigen::VectorXd::Zero(design.n_endogenous());
  std::vector<std::pair<double, Eigen::VectorXd>> path;
  path.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(warm.size());
    const SolverResult res =
        minimize_sqrt_quadratic(quad, rho, pbar, zero, warm, settings);
    if (!res.converged)
      throw SolverDidNotConverge("shrinkage path failed at rho = " +
                                 std::to_string(rho));
    warm = res.x;
    path.emplace_back(rho, res.x);
  }
  return path;
}

}  // namespace driveiv
