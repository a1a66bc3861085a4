#include "driveiv/rho_selection.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "driveiv/drive.hpp"
#include "driveiv/errors.hpp"
#include "driveiv/estimators.hpp"
#include "driveiv/rng.hpp"
#include "driveiv/stats.hpp"

namespace driveiv {

namespace {

void validate_bootstrap_settings(const BootstrapSettings& s) {
  if (!(s.alpha > 0.0 && s.alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  if (!(s.c_mult > 0.0)) throw ValidationError("c_mult must be positive");
  if (s.n_boot < 1) throw ValidationError("n_boot must be positive");
  if (s.max_outer_iters < 1)
    throw ValidationError("max_outer_iters must be positive");
  if (!(s.conv_tol > 0.0)) throw ValidationError("conv_tol must be positive");
}

double quantile_to_rho(double quantile, Eigen::Index p, Eigen::Index n,
                       const BootstrapSettings& s) {
  double sqrt_rho =
      std::sqrt(static_cast<double>(p)) * s.c_mult * quantile;
  if (s.root_n_scaling) sqrt_rho *= std::sqrt(static_cast<double>(n));
  return sqrt_rho * sqrt_rho;
}

}  // namespace

RhoRule RhoRule::eigenvalue_fraction(double c) {
  RhoRule rule;
  rule.kind = Kind::EigenvalueFraction;
  rule.c = c;
  return rule;
}

RhoRule RhoRule::bootstrap_score(const BootstrapSettings& settings) {
  RhoRule rule;
  rule.kind = Kind::BootstrapScoreQuantile;
  rule.bootstrap = settings;
  return rule;
}

RhoRule RhoRule::fixed_value(double rho) {
  if (!(rho >= 0.0)) throw ValidationError("fixed rho must be nonnegative");
  RhoRule rule;
  rule.kind = Kind::Fixed;
  rule.fixed = rho;
  return rule;
}

double rho_eigenvalue_rule(const ProjectedDesign& design, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("c must lie in [0, 1]");
  const Eigen::MatrixXd gram = design.gamma_hat.transpose() *
                               design.sigma_z_hat * design.gamma_hat;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (gram + gram.transpose()));
  return c * std::max(0.0, es.eigenvalues().minCoeff());
}

namespace {

// Relative numerical-zero threshold for the projected residual vector.
bool residuals_degenerate(const ProjectedDesign& design,
                          const Eigen::VectorXd& resid) {
  const double scale = std::max(design.y_proj.norm(),
                                design.x_proj.norm());
  return resid.norm() <= 1e-10 * scale;
}

double bootstrap_score_quantile_core(const ProjectedDesign& design,
                                     const Eigen::VectorXd& resid,
                                     const BootstrapSettings& settings) {
  const Eigen::Index n = design.n();
  const Eigen::Index p = design.n_endogenous();
  std::vector<double> stats(static_cast<std::size_t>(settings.n_boot));
  for (int b = 0; b < settings.n_boot; ++b) {
    // Independent substream per resample; the quantile is then invariant to
    // how resamples are scheduled.
    std::mt19937_64 rng =
        make_engine(derive_seed(settings.seed, {0xb007u, (std::uint64_t)b}));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Eigen::VectorXd num = Eigen::VectorXd::Zero(p);
    double denom = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double eps = resid(pick(rng));
      num += design.x_proj.row(i).transpose() * eps;
      denom += eps * eps;
    }
    num /= static_cast<double>(n);
    denom = std::sqrt(denom / static_cast<double>(n));
    const double norm = settings.two_norm ? num.norm()
                                          : num.lpNorm<Eigen::Infinity>();
    stats[static_cast<std::size_t>(b)] = denom > 0.0 ? norm / denom : 0.0;
  }
  return empirical_quantile(std::move(stats), 1.0 - settings.alpha);
}

}  // namespace

double score_quantile_bootstrap(const ProjectedDesign& design,
                                const Eigen::VectorXd& beta,
                                const BootstrapSettings& settings) {
  validate_bootstrap_settings(settings);
  if (beta.size() != design.n_endogenous())
    throw DimensionMismatch("beta length does not match design");
  const Eigen::VectorXd resid = design.y_proj - design.x_proj * beta;
  if (residuals_degenerate(design, resid))
    throw ZeroResiduals(
        "projected residuals are numerically zero at this coefficient "
        "(exactly-identified fit); use the dataset-aware overload");
  return bootstrap_score_quantile_core(design, resid, settings);
}

double score_quantile_bootstrap(const ProjectedDesign& design,
                                const IVDataset& data,
                                const Eigen::VectorXd& beta,
                                const BootstrapSettings& settings) {
  validate_bootstrap_settings(settings);
  if (beta.size() != design.n_endogenous())
    throw DimensionMismatch("beta length does not match design");
  Eigen::VectorXd resid = design.y_proj - design.x_proj * beta;
  if (residuals_degenerate(design, resid)) {
    // Exactly-identified fits interpolate the projected system; the raw
    // outcome residuals carry the error scale the score needs.
    resid = data.y - design.x_proj * beta;
    if (residuals_degenerate(design, resid))
      throw ZeroResiduals("residuals are identically zero");
  }
  return bootstrap_score_quantile_core(design, resid, settings);
}

namespace {

RhoIterationTrace bootstrap_iterate(const ProjectedDesign& design,
                                    const IVDataset* data,
                                    const BootstrapSettings& settings,
                                    const Estimate& init,
                                    const SolverSettings& solver) {
  validate_bootstrap_settings(settings);
  if (!init.beta.allFinite())
    throw NonFinite("initial estimate is not finite");

  const Eigen::Index p = design.n_endogenous();
  const Eigen::Index n = design.n();
  RhoIterationTrace trace;
  Eigen::VectorXd beta = init.beta;
  double rho_prev = -1.0;
  for (int k = 0; k < settings.max_outer_iters; ++k) {
    // The same resampling stream is reused across outer iterations, so the
    // update is a deterministic fixed-point map of beta and the penalty
    // sequence can settle exactly.
    const double quantile =
        data ? score_quantile_bootstrap(design, *data, beta, settings)
             : score_quantile_bootstrap(design, beta, settings);
    const double rho = quantile_to_rho(quantile, p, n, settings);
    trace.quantile_trace.push_back(quantile);
    trace.rho_trace.push_back(rho);
    if (rho_prev >= 0.0 &&
        std::abs(rho - rho_prev) <= settings.conv_tol * std::max(rho_prev, 1.0)) {
      trace.rho = rho;
      trace.converged = true;
      return trace;
    }
    rho_prev = rho;
    DriveSpec spec;
    spec.rho = rho;
    spec.solver = solver;
    beta = fit_drive(design, spec).beta;
  }
  trace.rho = rho_prev;
  trace.converged = false;
  return trace;
}

}  // namespace

RhoIterationTrace rho_bootstrap_iterative(const ProjectedDesign& design,
                                          const BootstrapSettings& settings,
                                          const Estimate& init,
                                          const SolverSettings& solver) {
  return bootstrap_iterate(design, nullptr, settings, init, solver);
}

RhoIterationTrace rho_bootstrap_iterative(const ProjectedDesign& design,
                                          const IVDataset& data,
                                          const BootstrapSettings& settings,
                                          const Estimate& init,
                                          const SolverSettings& solver) {
  return bootstrap_iterate(design, &data, settings, init, solver);
}

double lambda_star_analytic(int n, int p, double alpha, double c_mult) {
  if (n < 1 || p < 1) throw ValidationError("n and p must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  return c_mult * std::sqrt(static_cast<double>(n)) *
         normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(p)));
}

double resolve_rho(const RhoRule& rule, const ProjectedDesign& design,
                   const IVDataset& data, const SolverSettings& solver) {
  switch (rule.kind) {
    case RhoRule::Kind::EigenvalueFraction:
      return rho_eigenvalue_rule(design, rule.c);
    case RhoRule::Kind::Fixed:
      return rule.fixed;
    case RhoRule::Kind::BootstrapScoreQuantile: {
      const Estimate init = fit_tsls(design, data);
      return rho_bootstrap_iterative(design, data, rule.bootstrap, init, solver)
          .rho;
    }
  }
  throw ValidationError("unknown rho rule");
}

}  // namespace driveiv
