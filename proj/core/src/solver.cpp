#include "driveiv/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "driveiv/errors.hpp"

namespace driveiv {

namespace {

double penalty_value(double rho, double pbar, const Eigen::VectorXd& x) {
  if (rho == 0.0) return 0.0;
  const double t = x.norm();
  return std::pow(rho * (std::pow(t, pbar) + 1.0), 1.0 / pbar);
}

Eigen::VectorXd penalty_gradient(double rho, double pbar,
                                 const Eigen::VectorXd& x) {
  if (rho == 0.0) return Eigen::VectorXd::Zero(x.size());
  const double t = x.norm();
  const double s = penalty_value(rho, pbar, x);
  if (t < 1e-300) {
    if (pbar == 2.0) return Eigen::VectorXd::Zero(x.size());
    return Eigen::VectorXd::Zero(x.size());
  }
  const double coef = rho * std::pow(t, pbar - 2.0) * std::pow(s, 1.0 - pbar);
  return coef * x;
}

Eigen::MatrixXd penalty_hessian(double rho, double pbar,
                                const Eigen::VectorXd& x) {
  const Eigen::Index p = x.size();
  if (rho == 0.0) return Eigen::MatrixXd::Zero(p, p);
  const double t = x.norm();
  const double s = penalty_value(rho, pbar, x);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  if (t < 1e-12) {
    if (pbar == 2.0) return (rho / s) * eye;
    return Eigen::MatrixXd::Zero(p, p);
  }
  const Eigen::MatrixXd xxt = x * x.transpose();
  Eigen::MatrixXd h = rho * std::pow(s, 1.0 - pbar) *
                      (std::pow(t, pbar - 2.0) * eye +
                       (pbar - 2.0) * std::pow(t, pbar - 4.0) * xxt);
  h += (1.0 - pbar) * rho * rho * std::pow(s, 1.0 - 2.0 * pbar) *
       std::pow(t, 2.0 * (pbar - 2.0)) * xxt;
  return h;
}

struct KinkCandidate {
  bool attainable = false;
  bool certified = false;
  Eigen::VectorXd x;
};

// Looks for an interpolating point (Q = 0). When one exists, checks the
// subgradient optimality condition there: -(grad s + linear) must lie in
// {A^{1/2} u : |u| <= 1}.
KinkCandidate analyze_kink(const SqrtQuadratic& quad, double rho, double pbar,
                           const Eigen::VectorXd& linear) {
  KinkCandidate out;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(quad.a);
  Eigen::VectorXd x;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    x = ldlt.solve(quad.b);
  } else {
    x = quad.a.colPivHouseholderQr().solve(quad.b);
  }
  const double q_at = quad.eval(x);
  // Numerical-zero band for the minimum of the quadratic: the roundoff
  // floor of the quadratic form, widened to relative 1e-10 so that
  // near-degenerate designs (where the smoothed iteration would sit on an
  // unresolvable crease) are handled through the kink certificate; the
  // objective error of snapping to the interpolator is at most sqrt of the
  // band, ~1e-5 relative.
  const double magnitude =
      std::abs(x.dot(quad.a * x)) + 2.0 * std::abs(quad.b.dot(x)) +
      std::abs(quad.c);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
  if (q_at > std::max(floor, 1e-10 * std::max(1.0, quad.c))) return out;
  out.attainable = true;
  out.x = x;

  const Eigen::VectorXd v = penalty_gradient(rho, pbar, x) + linear;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad.a);
  const auto& lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (lam_max <= 0.0) {
    out.certified = v.norm() <= 1e-14;
    return out;
  }
  const Eigen::VectorXd w = es.eigenvectors().transpose() * v;
  double m2 = 0.0;
  bool in_range = true;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > 1e-14 * lam_max) {
      m2 += w(i) * w(i) / lam(i);
    } else if (std::abs(w(i)) > 1e-10 * (1.0 + v.norm())) {
      in_range = false;
    }
  }
  out.certified = in_range && m2 <= 1.0;
  return out;
}

}  // namespace

void validate_solver_settings(const SolverSettings& settings) {
  if (!(settings.grad_tol > 0.0))
    throw ValidationError("solver grad_tol must be positive");
  if (settings.max_iters < 1)
    throw ValidationError("solver max_iters must be at least 1");
  if (settings.smoothing_eps_schedule.empty())
    throw ValidationError("smoothing schedule must be nonempty");
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : settings.smoothing_eps_schedule) {
    if (!(eps > 0.0) || !(eps < prev))
      throw ValidationError(
          "smoothing schedule must be strictly decreasing and positive");
    prev = eps;
  }
}

double sqrt_quadratic_value(const SqrtQuadratic& quad, double rho, double pbar,
                            const Eigen::VectorXd& linear,
                            const Eigen::VectorXd& x, double eps) {
  const double r = std::sqrt(quad.eval(x) + eps * eps);
  return r + penalty_value(rho, pbar, x) + linear.dot(x);
}

Eigen::VectorXd sqrt_quadratic_gradient(const SqrtQuadratic& quad, double rho,
                                        double pbar,
                                        const Eigen::VectorXd& linear,
                                        const Eigen::VectorXd& x, double eps) {
  const double r = std::sqrt(quad.eval(x) + eps * eps);
  const Eigen::VectorXd u = quad.a * x - quad.b;
  return u / r + penalty_gradient(rho, pbar, x) + linear;
}

SolverResult minimize_sqrt_quadratic(const SqrtQuadratic& quad, double rho,
                                     double pbar,
                                     const Eigen::VectorXd& linear,
                                     const Eigen::VectorXd& warm_start,
                                     const SolverSettings& settings) {
  validate_solver_settings(settings);
  if (rho < 0.0) throw ValidationError("rho must be nonnegative");
  if (pbar < 2.0) throw ValidationError("pbar must be at least 2");

  // Interpolation degeneracy: when the quadratic can be driven to zero and
  // the subgradient condition holds there, the kink is the exact global
  // minimizer; the smoothed iteration would only creep toward it.
  const KinkCandidate kink = analyze_kink(quad, rho, pbar, linear);
  if (kink.attainable && kink.certified) {
    SolverResult result;
    result.x = kink.x;
    result.gradient_norm = 0.0;
    result.objective = std::sqrt(quad.eval(kink.x)) +
                       penalty_value(rho, pbar, kink.x) + linear.dot(kink.x);
    result.converged = true;
    result.at_kink = true;
    return result;
  }

  if (rho == 0.0) {
    // Without the penalty the objective sqrt(Q(x)) + l'x has an exact
    // minimizer. With x* = argmin Q, q0 = Q(x*), and m2 = l'A^+ l:
    // x = x* - sqrt(q0 / (1 - m2)) A^+ l when m2 < 1 (and l in range(A));
    // otherwise the objective is unbounded below.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad.a);
    const auto& lam = es.eigenvalues();
    const double lam_max = lam.maxCoeff();
    SolverResult result;
    result.x = warm_start;
    if (lam_max > 0.0) {
      const Eigen::VectorXd bw = es.eigenvectors().transpose() * quad.b;
      const Eigen::VectorXd lw = es.eigenvectors().transpose() * linear;
      Eigen::VectorXd xw = Eigen::VectorXd::Zero(warm_start.size());
      double m2 = 0.0;
      bool in_range = true;
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > 1e-14 * lam_max) {
          xw(i) = bw(i) / lam(i);
          m2 += lw(i) * lw(i) / lam(i);
        } else if (std::abs(lw(i)) > 1e-12 * (1.0 + linear.norm())) {
          in_range = false;
        }
      }
      if (in_range && m2 < 1.0) {
        const Eigen::VectorXd x_min = es.eigenvectors() * xw;
        const double q0 = quad.eval(x_min);
        Eigen::VectorXd pinv_l = Eigen::VectorXd::Zero(warm_start.size());
        for (Eigen::Index i = 0; i < lam.size(); ++i)
          if (lam(i) > 1e-14 * lam_max) pinv_l(i) = lw(i) / lam(i);
        pinv_l = es.eigenvectors() * pinv_l;
        result.x = x_min - std::sqrt(q0 / (1.0 - m2)) * pinv_l;
        result.objective = std::sqrt(quad.eval(result.x)) +
                           linear.dot(result.x);
        result.gradient_norm =
            sqrt_quadratic_gradient(quad, rho, pbar, linear, result.x,
                                    settings.smoothing_eps_schedule.back())
                .norm();
        result.converged = true;
        return result;
      }
    }
    result.converged = false;
    result.objective = std::sqrt(quad.eval(result.x)) + linear.dot(result.x);
    result.gradient_norm =
        sqrt_quadratic_gradient(quad, rho, pbar, linear, result.x,
                                settings.smoothing_eps_schedule.back())
            .norm();
    return result;
  }

  const Eigen::Index p = warm_start.size();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd x = warm_start;
  int iters = 0;
  bool converged = true;
  bool at_step_floor = false;
  const double diverge_scale = 1e10 * (1.0 + warm_start.norm());

  for (double eps : settings.smoothing_eps_schedule) {
    bool stage_done = false;
    at_step_floor = false;
    while (!stage_done) {
      if (iters >= settings.max_iters) {
        converged = false;
        break;
      }
      const Eigen::VectorXd g =
          sqrt_quadratic_gradient(quad, rho, pbar, linear, x, eps);
      if (g.norm() <= settings.grad_tol) {
        stage_done = true;
        break;
      }
      ++iters;

      // Full steps that contract the gradient norm are accepted outright:
      // near the optimum the per-step objective decrease falls below double
      // resolution, so an Armijo test on objective values alone would
      // stall. The exact Newton step is tried first (quadratic local
      // convergence); the Gauss-Newton step, whose residual part A/r stays
      // positive semidefinite through the cone crease, is the robust
      // fallback for the line search.
      const double r = std::sqrt(quad.eval(x) + eps * eps);
      const Eigen::VectorXd u = quad.a * x - quad.b;
      const Eigen::MatrixXd pen_h = penalty_hessian(rho, pbar, x);
      const Eigen::MatrixXd h_exact =
          quad.a / r - (u * u.transpose()) / (r * r * r) + pen_h;
      const Eigen::MatrixXd h_gn = quad.a / r + pen_h;

      bool stepped = false;
      for (const Eigen::MatrixXd* h : {&h_exact, &h_gn}) {
        Eigen::LDLT<Eigen::MatrixXd> try_ldlt(*h + 1e-14 * h->norm() * eye);
        if (try_ldlt.info() != Eigen::Success || !try_ldlt.isPositive())
          continue;
        const Eigen::VectorXd cand = try_ldlt.solve(-g);
        if (!cand.allFinite() || cand.dot(g) >= 0.0) continue;
        // The predicted distance to the optimum is below the resolution of
        // x itself: converged to the floating-point floor even though the
        // gradient cannot be driven further down.
        if (cand.norm() <= 64.0 * std::numeric_limits<double>::epsilon() *
                               (1.0 + x.norm())) {
          at_step_floor = true;
          stage_done = true;
          stepped = true;
          break;
        }
        const Eigen::VectorXd trial = x + cand;
        const Eigen::VectorXd gt =
            sqrt_quadratic_gradient(quad, rho, pbar, linear, trial, eps);
        if (gt.allFinite() && gt.norm() <= (1.0 - 1e-3) * g.norm()) {
          x = trial;
          stepped = true;
          break;
        }
      }
      if (stepped) continue;

      Eigen::VectorXd dx;
      bool newton_ok = false;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h_gn + 1e-14 * h_gn.norm() * eye);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        dx = ldlt.solve(-g);
        newton_ok = dx.dot(g) < 0.0 && dx.allFinite();
      }
      if (!newton_ok) dx = -g * (r / std::max(1e-300, quad.a.norm() + rho));

      // Global phase: backtracking on the smoothed objective.
      const double f0 = sqrt_quadratic_value(quad, rho, pbar, linear, x, eps);
      const double slope = g.dot(dx);
      double step = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 80; ++bt) {
        const Eigen::VectorXd trial = x + step * dx;
        if (trial == x) break;
        const double f1 =
            sqrt_quadratic_value(quad, rho, pbar, linear, trial, eps);
        if (f1 <= f0 + 1e-4 * step * slope) {
          x = trial;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // No further progress at this smoothing level.
        stage_done = true;
      }
      if (x.norm() > diverge_scale) {
        converged = false;
        stage_done = true;
      }
    }
    if (!converged) break;
  }

  SolverResult result;
  result.x = x;
  result.iterations = iters;
  result.gradient_norm =
      sqrt_quadratic_gradient(quad, rho, pbar, linear, x,
                              settings.smoothing_eps_schedule.back())
          .norm();
  result.objective = std::sqrt(quad.eval(x)) + penalty_value(rho, pbar, x) +
                     linear.dot(x);
  result.converged =
      converged && (result.gradient_norm <= settings.grad_tol || at_step_floor);

  // Uncertified interpolating point: keep whichever of the two candidates
  // evaluates lower (with slack for near-ties, where the exact kink point is
  // preferable to a smoothed neighbor).
  if (kink.attainable) {
    const double kink_obj = std::sqrt(quad.eval(kink.x)) +
                            penalty_value(rho, pbar, kink.x) +
                            linear.dot(kink.x);
    if (kink_obj <= result.objective + 1e-12 * (1.0 + std::abs(kink_obj))) {
      result.x = kink.x;
      result.objective = kink_obj;
      result.at_kink = true;
    }
  }
  return result;
}

}  // namespace driveiv
