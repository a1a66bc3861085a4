#pragma once

#include <Eigen/Dense>
#include <vector>

namespace driveiv {

// Quadratic form Q(x) = x'Ax - 2b'x + c with A symmetric PSD, so that
// sqrt(Q) is the root-mean-square loss of some least-squares system.
struct SqrtQuadratic {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double c = 0.0;

  double eval(const Eigen::VectorXd& x) const {
    return std::max(0.0, x.dot(a * x) - 2.0 * b.dot(x) + c);
  }
};

struct SolverSettings {
  double grad_tol = 1e-10;
  int max_iters = 10000;
  std::vector<double> smoothing_eps_schedule = {1e-4, 1e-8, 1e-12};
};

struct SolverResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;  // unsmoothed
  bool converged = false;
  // True when the returned point interpolates the quadratic (Q = 0) and the
  // subgradient optimality certificate holds there.
  bool at_kink = false;
};

// Minimizes f(x) = sqrt(Q(x)) + (rho (|x|^pbar + 1))^{1/pbar} + linear'x,
// pbar >= 2, by damped Newton / gradient descent with backtracking line
// search on the eps-smoothed residual sqrt(Q + eps^2), with continuation
// over the smoothing schedule. If the quadratic admits an interpolating
// point (Q = 0), the nonsmooth minimizer there is checked explicitly and
// returned when it beats the smoothed solution.
SolverResult minimize_sqrt_quadratic(const SqrtQuadratic& quad, double rho,
                                     double pbar,
                                     const Eigen::VectorXd& linear,
                                     const Eigen::VectorXd& warm_start,
                                     const SolverSettings& settings);

// eps-smoothed objective and its analytic gradient (exposed for gradient
// verification and the optimality certificates in tests).
double sqrt_quadratic_value(const SqrtQuadratic& quad, double rho, double pbar,
                            const Eigen::VectorXd& linear,
                            const Eigen::VectorXd& x, double eps);
Eigen::VectorXd sqrt_quadratic_gradient(const SqrtQuadratic& quad, double rho,
                                        double pbar,
                                        const Eigen::VectorXd& linear,
                                        const Eigen::VectorXd& x, double eps);

void validate_solver_settings(const SolverSettings& settings);

}  // namespace driveiv
