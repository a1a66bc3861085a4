#pragma once

#include <cstdint>

#include "driveiv/types.hpp"

namespace driveiv {

struct GaussianLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// One-dimensional structural model Y = X beta0 + Z eta + U, X = Z gamma + U
// with Z, U standard normal; hetero_alpha scales the conditional standard
// deviation of U given Z as alpha |Z| + 1.
struct SimpleIVModel {
  double beta0 = 1.0;
  double gamma = 1.0;
  double eta = 0.0;
  double hetero_alpha = 0.0;
};

// 2-Wasserstein distance between Gaussian laws via the closed form
// sqrt(|mu1-mu2|^2 + Tr(S1 + S2 - 2 (S2^1/2 S1 S2^1/2)^1/2)).
double gaussian_w2(const GaussianLaw& a, const GaussianLaw& b);

// Law of (X, Y) given Z = z under the model. Degenerate (rank-one)
// covariances are expected: the conditional noise is a single U.
GaussianLaw conditional_law(const SimpleIVModel& model, double z);

// Monte-Carlo estimate of E_Z W2 between the conditional laws of two models
// that differ in exactly one of {eta, gamma, hetero_alpha}.
double expected_conditional_shift(const SimpleIVModel& model_a,
                                  const SimpleIVModel& model_b,
                                  int z_draws, std::uint64_t seed);

// Closed form of the same expectation; the Monte-Carlo target.
double expected_conditional_shift_exact(const SimpleIVModel& model_a,
                                        const SimpleIVModel& model_b);

// Worst-case mean squared loss over the 2-Wasserstein ball of radius-squared
// rho around the projected empirical distribution, in closed form:
// (sqrt(l_iv) + sqrt(rho (|beta|^2 + 1)))^2.
double worst_case_value(const ProjectedDesign& design,
                        const Eigen::VectorXd& beta, double rho);

struct DualSolution {
  double value = 0.0;
  double gamma = 0.0;
};

// Independent evaluation of the same worst case through the 1-D dual
// problem inf_{g > a'a} g rho + g l_iv / (g - a'a), minimized numerically by
// golden-section search. Serves as the oracle for worst_case_value.
DualSolution worst_case_dual(const ProjectedDesign& design,
                             const Eigen::VectorXd& beta, double rho);
double worst_case_value_dual(const ProjectedDesign& design,
                             const Eigen::VectorXd& beta, double rho);

// Perturbed samples W_i attaining the worst case: the mean squared loss at
// beta over the rows equals worst_case_value and the empirical transport
// cost (1/n) sum |W_i - W~_i|^2 equals rho.
Eigen::MatrixXd worst_case_samples(const ProjectedDesign& design,
                                   const Eigen::VectorXd& beta, double rho);

}  // namespace driveiv
