#include "driveiv/asymptotics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "driveiv/errors.hpp"
#include "driveiv/rng.hpp"
#include "driveiv/stats.hpp"

namespace driveiv {

namespace {

void validate_spec(const AsymptoticSpec& spec) {
  const Eigen::Index p = spec.beta0.size();
  const Eigen::Index d = spec.gamma.rows();
  if (spec.gamma.cols() != p)
    throw DimensionMismatch("gamma columns must match beta0 length");
  if (spec.sigma_z.rows() != d || spec.sigma_z.cols() != d)
    throw DimensionMismatch("sigma_z must be d x d");
  if (d < p) throw UnderIdentified("gamma must have at least p rows");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.sigma_z);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("sigma_z must be positive definite");
  if (!(spec.sigma2_eps > 0.0))
    throw ValidationError("sigma2_eps must be positive");
  if (!(spec.rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  if (spec.n_draws < 1) throw ValidationError("n_draws must be positive");
}

Eigen::MatrixXd gaussian_draws(const Eigen::MatrixXd& cov, int n_draws,
                               std::uint64_t seed) {
  const Eigen::Index k = cov.rows();
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw SingularGram("covariance is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();
  Eigen::MatrixXd out(n_draws, k);
  for (int i = 0; i < n_draws; ++i) {
    std::mt19937_64 rng = make_engine(derive_seed(seed, {(std::uint64_t)i}));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd u(k);
    for (Eigen::Index j = 0; j < k; ++j) u(j) = normal(rng);
    out.row(i) = (chol * u).transpose();
  }
  return out;
}

}  // namespace

Eigen::MatrixXd sample_tsls_asymptotic(const AsymptoticSpec& spec) {
  validate_spec(spec);
  const Eigen::MatrixXd gram =
      spec.gamma.transpose() * spec.sigma_z * spec.gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double lam_max = es.eigenvalues().maxCoeff();
  if (!(lam_max > 0.0) ||
      es.eigenvalues().minCoeff() <= 1e-12 * lam_max)
    throw SingularGram("gamma' sigma_z gamma is numerically singular");
  const Eigen::MatrixXd cov =
      spec.sigma2_eps *
      es.eigenvectors() *
      es.eigenvalues().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  return gaussian_draws(cov, spec.n_draws, derive_seed(spec.seed, {0x7515u}));
}

AsymptoticSample sample_drive_asymptotic(const AsymptoticSpec& spec,
                                         const SolverSettings& solver) {
  validate_spec(spec);
  const Eigen::Index p = spec.beta0.size();
  const Eigen::Index d = spec.gamma.rows();
  const Eigen::MatrixXd gram =
      spec.gamma.transpose() * spec.sigma_z * spec.gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_es(gram);
  if (gram_es.eigenvalues().minCoeff() <=
      1e-12 * gram_es.eigenvalues().maxCoeff())
    throw SingularGram("gamma' sigma_z gamma is numerically singular");

  AsymptoticSample out;
  out.rho_out_of_range = spec.rho > gram_es.eigenvalues().minCoeff() * (1 + 1e-12);
  out.draws.resize(spec.n_draws, p);
  out.converged.assign(static_cast<std::size_t>(spec.n_draws), 1);

  const Eigen::VectorXd linear =
      std::sqrt(spec.rho) * spec.beta0 /
      std::sqrt(1.0 + spec.beta0.squaredNorm());
  const bool linear_vanishes = linear.norm() == 0.0;

  out.noise = gaussian_draws(spec.sigma2_eps * spec.sigma_z, spec.n_draws,
                             derive_seed(spec.seed, {0xd21eu}));
  const Eigen::MatrixXd& noise = out.noise;
  const Eigen::MatrixXd sigma_inv = spec.sigma_z.inverse();
  const Eigen::MatrixXd a = gram;  // (sigma_z gamma)' sigma_z^{-1} (sigma_z gamma)
  const Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);

  for (int i = 0; i < spec.n_draws; ++i) {
    const Eigen::VectorXd w = noise.row(i).transpose();
    const Eigen::VectorXd tsls_delta =
        -gram_ldlt.solve(spec.gamma.transpose() * w);
    if (linear_vanishes) {
      // The square root is monotone, so the argmin is the TSLS one.
      out.draws.row(i) = tsls_delta.transpose();
      continue;
    }
    if (p == d && !out.rho_out_of_range) {
      // Exactly identified case: the first term is a cone with vertex at
      // the TSLS point (where it vanishes), and within the admissible rho
      // range the linear term cannot pull the argmin off the vertex.
      out.draws.row(i) = tsls_delta.transpose();
      continue;
    }
    SqrtQuadratic quad;
    quad.a = a;
    quad.b = -spec.gamma.transpose() * w;
    quad.c = w.dot(sigma_inv * w);
    const SolverResult res =
        minimize_sqrt_quadratic(quad, 0.0, 2.0, linear, tsls_delta, solver);
    out.draws.row(i) = res.x.transpose();
    if (!res.converged) {
      out.converged[static_cast<std::size_t>(i)] = 0;
      ++out.n_failed;
    }
  }
  return out;
}

Eigen::VectorXd ks_distance(const Eigen::MatrixXd& sample_a,
                            const Eigen::MatrixXd& sample_b) {
  if (sample_a.cols() != sample_b.cols())
    throw DimensionMismatch("samples have different dimensions");
  if (sample_a.rows() == 0 || sample_b.rows() == 0)
    throw EmptySample("ks_distance: empty sample");
  Eigen::VectorXd out(sample_a.cols());
  for (Eigen::Index j = 0; j < sample_a.cols(); ++j) {
    std::vector<double> a(sample_a.rows()), b(sample_b.rows());
    for (Eigen::Index i = 0; i < sample_a.rows(); ++i) a[i] = sample_a(i, j);
    for (Eigen::Index i = 0; i < sample_b.rows(); ++i) b[i] = sample_b(i, j);
    out(j) = ks_statistic(std::move(a), std::move(b));
  }
  return out;
}

}  // namespace driveiv
