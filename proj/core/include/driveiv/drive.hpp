#pragma once

#include <utility>
#include <vector>

#include "driveiv/solver.hpp"
#include "driveiv/types.hpp"

namespace driveiv {

// Robustness radius / penalty plus the Wasserstein order. q_order = 2 gives
// the square-root-ridge objective; q in (1, 2] is supported, with the
// penalty exponent pbar = q/(q-1) conjugate to q.
struct DriveSpec {
  double rho = 0.0;
  double q_order = 2.0;
  SolverSettings solver;
};

// Limiting objective data: minimize
//   sqrt((beta - beta0)' gram (beta - beta0)) + sqrt(rho (|beta|^2 + 1)).
struct PopulationLimit {
  Eigen::VectorXd beta0;
  Eigen::MatrixXd gram;
  double rho = 0.0;
};

// Linear moment system psi_i(theta) = m_i (y_i - theta'x_i), summarized by
// jacobian = (1/n) sum m_i x_i', moment0 = (1/n) sum m_i y_i, and a positive
// definite weight, so that gbar(theta) = moment0 - jacobian * theta.
struct MomentSystem {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd moment0;
  Eigen::MatrixXd weight;
};

MomentSystem iv_moment_system(const IVDataset& data);
MomentSystem ols_moment_system(const IVDataset& data);

double drive_objective(const Eigen::VectorXd& beta,
                       const ProjectedDesign& design, const DriveSpec& spec);

Estimate fit_drive(const ProjectedDesign& design, const DriveSpec& spec);

Eigen::VectorXd solve_population_limit(const PopulationLimit& limit,
                                       const SolverSettings& settings = {});

Estimate fit_sqrt_ridge_gmm(const MomentSystem& moments, const DriveSpec& spec);

// Fits along an increasing rho grid, warm-starting each solve from the
// previous solution.
std::vector<std::pair<double, Eigen::VectorXd>> drive_shrinkage_path(
    const ProjectedDesign& design, const std::vector<double>& rho_grid,
    double q_order = 2.0, const SolverSettings& settings = {});

void validate_drive_spec(const DriveSpec& spec);

}  // namespace driveiv
