#include "driveiv/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "driveiv/errors.hpp"
#include "driveiv/projection.hpp"

namespace driveiv {

namespace {

constexpr double kSingularTol = 1e-10;
constexpr double kWeakInstrumentF = 10.0;

// Solves M beta = rhs for symmetric PSD M, rejecting numerically singular
// systems with the given exception message.
template <typename Exc>
Eigen::VectorXd solve_spd_or_throw(const Eigen::MatrixXd& m,
                                   const Eigen::VectorXd& rhs,
                                   const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (!(lam_max > 0.0) || lam.minCoeff() <= kSingularTol * lam_max)
    throw Exc(what);
  return es.eigenvectors() *
         (es.eigenvectors().transpose() * rhs).cwiseQuotient(lam);
}

double mean_squared_residual(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& beta) {
  return (y - x * beta).squaredNorm() / static_cast<double>(y.size());
}

// First-stage F statistic per endogenous column; the min over columns flags
// weak instruments (rule-of-thumb threshold 10).
double min_first_stage_f(const ProjectedDesign& design, const IVDataset& data) {
  const double n = static_cast<double>(data.n());
  const double d = static_cast<double>(data.n_instruments());
  double fmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < data.n_endogenous(); ++j) {
    const double explained = design.x_proj.col(j).squaredNorm();
    const double resid = (data.x.col(j) - design.x_proj.col(j)).squaredNorm();
    const double f = resid > 0.0
                         ? (explained / d) / (resid / std::max(1.0, n - d))
                         : std::numeric_limits<double>::infinity();
    fmin = std::min(fmin, f);
  }
  return fmin;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Ols: return "ols";
    case EstimatorKind::Tsls: return "tsls";
    case EstimatorKind::KClass: return "kclass";
    case EstimatorKind::TslsRidge: return "tsls_ridge";
    case EstimatorKind::SqrtRidgeOls: return "sqrt_ridge_ols";
    case EstimatorKind::Drive: return "drive";
    case EstimatorKind::SqrtRidgeGmm: return "sqrt_ridge_gmm";
  }
  return "unknown";
}

double kappa_from_anchor_gamma(double gamma) {
  if (!(gamma >= 1.0))
    throw ValidationError("anchor gamma must be at least 1");
  return 1.0 - 1.0 / gamma;
}

Estimate fit_ols(const IVDataset& data) {
  validate_dataset(data);
  const double n = static_cast<double>(data.n());
  const Eigen::MatrixXd xtx = data.x.transpose() * data.x / n;
  const Eigen::VectorXd xty = data.x.transpose() * data.y / n;
  Estimate est;
  est.beta = solve_spd_or_throw<SingularDesign>(
      xtx, xty, "x'x is numerically singular");
  est.kind = EstimatorKind::Ols;
  est.diagnostics.objective = mean_squared_residual(data.y, data.x, est.beta);
  return est;
}

Estimate fit_tsls(const ProjectedDesign& design, const IVDataset& data) {
  const double n = static_cast<double>(data.n());
  const Eigen::MatrixXd a =
      design.x_proj.transpose() * design.x_proj / n;
  const Eigen::VectorXd b = design.x_proj.transpose() * data.y / n;
  Estimate est;
  est.beta = solve_spd_or_throw<SingularProjectedDesign>(
      a, b, "x'P_z x is numerically singular (weak or collinear instruments)");
  est.kind = EstimatorKind::Tsls;
  est.diagnostics.objective =
      mean_squared_residual(design.y_proj, design.x_proj, est.beta);
  if (min_first_stage_f(design, data) < kWeakInstrumentF)
    est.diagnostics.warnings.push_back("weak_instruments");
  return est;
}

Estimate fit_kclass(const ProjectedDesign& design, const IVDataset& data,
                    const KClassSpec& spec) {
  if (!(spec.kappa >= 0.0 && spec.kappa <= 1.0))
    throw ValidationError("kappa must lie in [0, 1]");
  const double n = static_cast<double>(data.n());
  const double k = spec.kappa;
  // X'(I - kappa M_z)X = (1-kappa) X'X + kappa X'P_z X, likewise for Y.
  const Eigen::MatrixXd a =
      ((1.0 - k) * (data.x.transpose() * data.x) +
       k * (design.x_proj.transpose() * design.x_proj)) / n;
  const Eigen::VectorXd b =
      ((1.0 - k) * (data.x.transpose() * data.y) +
       k * (design.x_proj.transpose() * data.y)) / n;
  Estimate est;
  est.beta = solve_spd_or_throw<SingularDesign>(
      a, b, "k-class design matrix is numerically singular");
  est.kind = EstimatorKind::KClass;
  est.kappa = k;
  est.diagnostics.objective =
      k * mean_squared_residual(design.y_proj, design.x_proj, est.beta) +
      (1.0 - k) * mean_squared_residual(data.y, data.x, est.beta);
  return est;
}

Estimate fit_kclass(const IVDataset& data, const KClassSpec& spec) {
  return fit_kclass(project_onto_instruments(data), data, spec);
}

Estimate fit_tsls_ridge(const ProjectedDesign& design, const IVDataset& data,
                        const RidgeSpec& spec) {
  if (!(spec.rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  const double n = static_cast<double>(data.n());
  const Eigen::Index p = design.n_endogenous();
  const Eigen::MatrixXd a =
      design.x_proj.transpose() * design.x_proj / n +
      spec.rho * Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd b = design.x_proj.transpose() * data.y / n;
  Estimate est;
  est.beta = a.ldlt().solve(b);
  est.kind = EstimatorKind::TslsRidge;
  est.rho = spec.rho;
  est.diagnostics.objective =
      mean_squared_residual(data.y, design.x_proj, est.beta) +
      spec.rho * est.beta.squaredNorm();
  return est;
}

Estimate fit_sqrt_ridge_ols(const IVDataset& data, const RidgeSpec& spec,
                            const SolverSettings& settings) {
  validate_dataset(data);
  if (!(spec.rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  const double n = static_cast<double>(data.n());
  SqrtQuadratic quad;
  quad.a = data.x.transpose() * data.x / n;
  quad.b = data.x.transpose() * data.y / n;
  quad.c = data.y.squaredNorm() / n;
  const Eigen::VectorXd warm = quad.a.ldlt().solve(quad.b);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(data.n_endogenous());
  const SolverResult res =
      minimize_sqrt_quadratic(quad, spec.rho, 2.0, zero, warm, settings);
  if (!res.converged)
    throw SolverDidNotConverge(
        "square-root-ridge solver did not reach gradient tolerance");
  Estimate est;
  est.beta = res.x;
  est.kind = EstimatorKind::SqrtRidgeOls;
  est.rho = spec.rho;
  est.diagnostics.iterations = res.iterations;
  est.diagnostics.gradient_norm = res.gradient_norm;
  est.diagnostics.objective = res.objective;
  return est;
}

}  // namespace driveiv
