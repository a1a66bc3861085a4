#pragma once

#include <cstdint>
#include <vector>

#include "driveiv/solver.hpp"
#include "driveiv/types.hpp"

namespace driveiv {

struct BootstrapSettings {
  double alpha = 0.05;
  double c_mult = 1.1;
  int n_boot = 500;
  int max_outer_iters = 20;
  double conv_tol = 1e-6;
  std::uint64_t seed = 0;
  // Use |.|_2 instead of |.|_inf in the score statistic.
  bool two_norm = false;
  // Scale the bootstrapped quantile by sqrt(n) in the quantile -> rho map.
  // The default map sqrt(rho) = sqrt(p) c q yields penalties of order 1/n;
  // this mode keeps the selected radius commensurate with the first-stage
  // signal at large n.
  bool root_n_scaling = false;
};

struct RhoRule {
  enum class Kind { EigenvalueFraction, BootstrapScoreQuantile, Fixed };
  Kind kind = Kind::EigenvalueFraction;
  double c = 0.5;
  BootstrapSettings bootstrap;
  double fixed = 0.0;

  static RhoRule eigenvalue_fraction(double c);
  static RhoRule bootstrap_score(const BootstrapSettings& settings);
  static RhoRule fixed_value(double rho);
};

// c * lambda_min(gamma_hat' sigma_z_hat gamma_hat), the first-stage
// eigenvalue rule.
double rho_eigenvalue_rule(const ProjectedDesign& design, double c);

// (1 - alpha)-quantile, over bootstrap resamples of the projected residuals
// paired with the fixed projected regressor rows, of
// |E_n(x~ eps)|_inf / sqrt(E_n(eps^2)).
// Throws ZeroResiduals when the projected residuals vanish, which happens
// identically in exactly-identified designs at the TSLS coefficient.
double score_quantile_bootstrap(const ProjectedDesign& design,
                                const Eigen::VectorXd& beta,
                                const BootstrapSettings& settings);

// Same statistic, but when the projected residuals are numerically zero the
// resampling falls back to the raw-outcome residuals y - x~'beta, which
// carry the actual error scale. This keeps the score defined along the
// entire iterative path in just-identified designs.
double score_quantile_bootstrap(const ProjectedDesign& design,
                                const IVDataset& data,
                                const Eigen::VectorXd& beta,
                                const BootstrapSettings& settings);

struct RhoIterationTrace {
  double rho = 0.0;
  std::vector<double> rho_trace;
  std::vector<double> quantile_trace;
  bool converged = false;
};

// Alternates quantile estimation at the current coefficient with refitting
// at the mapped penalty until the penalty stabilizes.
RhoIterationTrace rho_bootstrap_iterative(const ProjectedDesign& design,
                                          const BootstrapSettings& settings,
                                          const Estimate& init,
                                          const SolverSettings& solver = {});

// Dataset-aware variant using the raw-residual fallback of the score.
RhoIterationTrace rho_bootstrap_iterative(const ProjectedDesign& design,
                                          const IVDataset& data,
                                          const BootstrapSettings& settings,
                                          const Estimate& init,
                                          const SolverSettings& solver = {});

// c * sqrt(n) * Phi^{-1}(1 - alpha / (2p)).
double lambda_star_analytic(int n, int p, double alpha, double c_mult);

// Resolves any rule to a concrete penalty for the given design (bootstrap
// rules are initialized at TSLS).
double resolve_rho(const RhoRule& rule, const ProjectedDesign& design,
                   const IVDataset& data, const SolverSettings& solver = {});

}  // namespace driveiv
