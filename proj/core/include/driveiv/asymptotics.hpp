#pragma once

#include <cstdint>
#include <vector>

#include "driveiv/solver.hpp"
#include "driveiv/types.hpp"

namespace driveiv {

struct AsymptoticSpec {
  Eigen::VectorXd beta0;   // p
  Eigen::MatrixXd gamma;   // d x p
  Eigen::MatrixXd sigma_z; // d x d, SPD
  double sigma2_eps = 1.0;
  double rho = 0.0;
  int n_draws = 10000;
  std::uint64_t seed = 0;
};

struct AsymptoticSample {
  Eigen::MatrixXd draws;  // n_draws x p
  Eigen::MatrixXd noise;  // n_draws x d, the sampled N(0, sigma2 sigma_z)
  // Per-draw convergence of the numerical argmin path (always true on the
  // closed-form paths).
  std::vector<std::uint8_t> converged;
  // Set when rho exceeds lambda_min(gamma' sigma_z gamma).
  bool rho_out_of_range = false;
  int n_failed = 0;
};

// Draws from N(0, sigma2 (gamma' sigma_z gamma)^{-1}).
Eigen::MatrixXd sample_tsls_asymptotic(const AsymptoticSpec& spec);

// Samples the limiting law of the robust estimator: per draw, samples
// W ~ N(0, sigma2 sigma_z) and minimizes over delta
//   sqrt((W + sigma_z gamma delta)' sigma_z^{-1} (W + sigma_z gamma delta))
//   + sqrt(rho) beta0' delta / sqrt(1 + |beta0|^2).
// Closed forms are used when the linear term vanishes or when d = p = 1.
AsymptoticSample sample_drive_asymptotic(const AsymptoticSpec& spec,
                                         const SolverSettings& solver = {});

// Per-coordinate two-sample Kolmogorov-Smirnov distances.
Eigen::VectorXd ks_distance(const Eigen::MatrixXd& sample_a,
                            const Eigen::MatrixXd& sample_b);

}  // namespace driveiv
