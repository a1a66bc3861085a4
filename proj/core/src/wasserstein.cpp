#include "driveiv/wasserstein.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "driveiv/errors.hpp"
#include "driveiv/rng.hpp"

namespace driveiv {

namespace {

constexpr double kEigClampTol = -1e-12;

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (m + m.transpose()));
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < kEigClampTol)
      throw ValidationError("covariance has eigenvalue below -1e-12");
    lam(i) = std::sqrt(std::max(0.0, lam(i)));
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

double projected_loss(const ProjectedDesign& design,
                      const Eigen::VectorXd& beta) {
  if (beta.size() != design.n_endogenous())
    throw DimensionMismatch("beta length does not match design");
  return (design.y_proj - design.x_proj * beta).squaredNorm() /
         static_cast<double>(design.n());
}

// Number of parameters in which the two models differ; also rejects pairs
// with differing beta0.
int count_differences(const SimpleIVModel& a, const SimpleIVModel& b) {
  if (a.beta0 != b.beta0)
    throw UnsupportedPair("models must share beta0");
  int diffs = 0;
  if (a.eta != b.eta) ++diffs;
  if (a.gamma != b.gamma) ++diffs;
  if (a.hetero_alpha != b.hetero_alpha) ++diffs;
  if (diffs != 1)
    throw UnsupportedPair(
        "models must differ in exactly one of {eta, gamma, hetero_alpha}");
  return diffs;
}

}  // namespace

double gaussian_w2(const GaussianLaw& a, const GaussianLaw& b) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows())
    throw DimensionMismatch("Gaussian laws have different dimensions");
  const Eigen::MatrixXd sqrt_b = psd_sqrt(b.cov);
  const Eigen::MatrixXd inner = psd_sqrt(sqrt_b * a.cov * sqrt_b);
  const double trace_term =
      std::max(0.0, (a.cov + b.cov - 2.0 * inner).trace());
  return std::sqrt((a.mean - b.mean).squaredNorm() + trace_term);
}

GaussianLaw conditional_law(const SimpleIVModel& model, double z) {
  // X | Z=z = z gamma + U, Y | Z=z = z (gamma beta0 + eta) + (beta0 + 1) U,
  // with sd(U | Z=z) = alpha |z| + 1.
  const double load = model.beta0 + 1.0;
  const double sd = model.hetero_alpha * std::abs(z) + 1.0;
  GaussianLaw law;
  law.mean.resize(2);
  law.mean << z * model.gamma, z * (model.gamma * model.beta0 + model.eta);
  law.cov.resize(2, 2);
  law.cov << 1.0, load, load, load * load;
  law.cov *= sd * sd;
  return law;
}

double expected_conditional_shift(const SimpleIVModel& model_a,
                                  const SimpleIVModel& model_b,
                                  int z_draws, std::uint64_t seed) {
  count_differences(model_a, model_b);
  if (z_draws < 1) throw ValidationError("z_draws must be positive");
  std::mt19937_64 rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0.0;
  for (int i = 0; i < z_draws; ++i) {
    const double z = normal(rng);
    sum += gaussian_w2(conditional_law(model_a, z), conditional_law(model_b, z));
  }
  return sum / static_cast<double>(z_draws);
}

double expected_conditional_shift_exact(const SimpleIVModel& model_a,
                                        const SimpleIVModel& model_b) {
  count_differences(model_a, model_b);
  const double root_2_over_pi = std::sqrt(2.0 / M_PI);
  const double beta0 = model_a.beta0;
  if (model_a.eta != model_b.eta)
    return root_2_over_pi * std::abs(model_a.eta - model_b.eta);
  if (model_a.gamma != model_b.gamma)
    return root_2_over_pi * std::sqrt(1.0 + beta0 * beta0) *
           std::abs(model_a.gamma - model_b.gamma);
  // Heteroskedastic pair: W2(z) = |a1 - a2| |z| sqrt(Tr C) with
  // C = [[1, beta0+1], [beta0+1, (beta0+1)^2]].
  const double load = beta0 + 1.0;
  return root_2_over_pi * std::sqrt(1.0 + load * load) *
         std::abs(model_a.hetero_alpha - model_b.hetero_alpha);
}

double worst_case_value(const ProjectedDesign& design,
                        const Eigen::VectorXd& beta, double rho) {
  if (!(rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  const double loss = projected_loss(design, beta);
  const double aa = beta.squaredNorm() + 1.0;
  const double root = std::sqrt(loss) + std::sqrt(rho * aa);
  return root * root;
}

DualSolution worst_case_dual(const ProjectedDesign& design,
                             const Eigen::VectorXd& beta, double rho) {
  if (!(rho > 0.0))
    throw DualBracketFailure("dual search requires rho > 0");
  const double loss = projected_loss(design, beta);
  const double aa = beta.squaredNorm() + 1.0;
  const double lo = aa * (1.0 + 1e-8);
  const double hi = aa + 2.0 * std::sqrt(loss * aa / rho) + 10.0;
  if (!(hi > lo))
    throw DualBracketFailure("dual bracket is empty");

  const auto h = [&](double g) { return g * rho + g * loss / (g - aa); };
  // Golden-section search on the convex dual.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + b); ++it) {
    if (hc < hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - invphi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + invphi * (b - a);
      hd = h(d);
    }
  }
  DualSolution sol;
  sol.gamma = 0.5 * (a + b);
  sol.value = h(sol.gamma);
  // The boundary gamma -> a'a+ corresponds to zero projected loss; the dual
  // value there is rho a'a.
  const double boundary = lo * rho + lo * loss / (lo - aa);
  if (boundary < sol.value) {
    sol.gamma = lo;
    sol.value = boundary;
  }
  return sol;
}

double worst_case_value_dual(const ProjectedDesign& design,
                             const Eigen::VectorXd& beta, double rho) {
  return worst_case_dual(design, beta, rho).value;
}

Eigen::MatrixXd worst_case_samples(const ProjectedDesign& design,
                                   const Eigen::VectorXd& beta, double rho) {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const double loss = projected_loss(design, beta);
  const double aa = beta.squaredNorm() + 1.0;
  const double gamma_star = std::sqrt(loss * aa / rho) + aa;
  const double gap = gamma_star - aa;
  if (!(gap > 1e-14 * aa))
    throw DegenerateGamma(
        "optimal dual variable hits the boundary (zero projected loss)");

  const Eigen::Index n = design.n();
  const Eigen::Index p = design.n_endogenous();
  Eigen::VectorXd alpha(p + 1);
  alpha.head(p) = -beta;
  alpha(p) = 1.0;
  Eigen::MatrixXd w(n, p + 1);
  w.leftCols(p) = design.x_proj;
  w.col(p) = design.y_proj;
  // (I - alpha alpha'/gamma)^{-1} = I + alpha alpha'/(gamma - alpha'alpha).
  const Eigen::VectorXd scores = w * alpha;
  return w + (scores / gap) * alpha.transpose();
}

}  // namespace driveiv
