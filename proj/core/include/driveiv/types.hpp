#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace driveiv {

// Raw IV observations: outcome y (n), endogenous regressors x (n x p),
// instruments z (n x d) with n >= d >= p >= 1.
struct IVDataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  Eigen::MatrixXd z;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index n_endogenous() const { return x.cols(); }
  Eigen::Index n_instruments() const { return z.cols(); }
};

// Instrument-space projections and first-stage quantities shared by the
// estimators. x_proj and y_proj are the columns of X and Y projected onto
// the column space of Z; gamma_hat is the first-stage least-squares
// coefficient; sigma_z_hat = Z'Z/n.
struct ProjectedDesign {
  Eigen::MatrixXd x_proj;
  Eigen::VectorXd y_proj;
  Eigen::MatrixXd gamma_hat;
  Eigen::MatrixXd sigma_z_hat;
  Eigen::Index qr_rank = 0;

  Eigen::Index n() const { return y_proj.size(); }
  Eigen::Index n_endogenous() const { return x_proj.cols(); }
  Eigen::Index n_instruments() const { return sigma_z_hat.cols(); }
};

enum class EstimatorKind {
  Ols,
  Tsls,
  KClass,
  TslsRidge,
  SqrtRidgeOls,
  Drive,
  SqrtRidgeGmm,
};

std::string estimator_name(EstimatorKind kind);

struct Diagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
  std::vector<std::string> warnings;
};

struct Estimate {
  Eigen::VectorXd beta;
  EstimatorKind kind = EstimatorKind::Ols;
  std::optional<double> rho;
  std::optional<double> kappa;
  Diagnostics diagnostics;
};

}  // namespace driveiv
