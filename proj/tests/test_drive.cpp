#include <doctest.h>

#include <cmath>
#include <random>

#include "driveiv/drive.hpp"
#include "driveiv/errors.hpp"
#include "driveiv/estimators.hpp"
#include "driveiv/projection.hpp"
#include "driveiv/rho_selection.hpp"
#include "driveiv/rng.hpp"
#include "driveiv/simulation.hpp"

#include "helpers.hpp"

using namespace driveiv;

namespace {

// Exactly collinear projected design with x'x/n = 1 and y = x * beta0.
ProjectedDesign unit_design(int n, double beta0) {
  ProjectedDesign d;
  d.x_proj.resize(n, 1);
  for (int i = 0; i < n; ++i) d.x_proj(i, 0) = (i % 2) ? 1.0 : -1.0;
  d.y_proj = beta0 * d.x_proj.col(0);
  d.gamma_hat = Eigen::MatrixXd::Identity(1, 1);
  d.sigma_z_hat = Eigen::MatrixXd::Identity(1, 1);
  d.qr_rank = 1;
  return d;
}

// Plain-double reimplementation of the objective, kept independent of the
// Eigen-based path.
double objective_oracle(const std::vector<double>& beta,
                        const ProjectedDesign& design, double rho) {
  const int n = static_cast<int>(design.n());
  const int p = static_cast<int>(design.n_endogenous());
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double pred = 0.0;
    for (int j = 0; j < p; ++j) pred += design.x_proj(i, j) * beta[j];
    const double r = design.y_proj(i) - pred;
    ss += r * r;
  }
  double norm2 = 0.0;
  for (double b : beta) norm2 += b * b;
  return std::sqrt(ss / n) + std::sqrt(rho * (norm2 + 1.0));
}

}  // namespace

TEST_CASE("objective vanishes at an interpolating coefficient with rho zero") {
  const ProjectedDesign design = unit_design(20, 1.0);
  DriveSpec spec;
  spec.rho = 0.0;
  CHECK(drive_objective(Eigen::VectorXd::Ones(1), design, spec) == 0.0);
}

TEST_CASE("objective at the origin is the penalty plus the root loss") {
  const ProjectedDesign design = unit_design(20, 1.0);
  DriveSpec spec;
  spec.rho = 1.0;
  const double value =
      drive_objective(Eigen::VectorXd::Zero(1), design, spec);
  CHECK(value == doctest::Approx(1.0 + 1.0).epsilon(1e-12));
}

TEST_CASE("objective matches a scalar reimplementation digit for digit") {
  const IVDataset data = test_helpers::make_random(37, 2, 3, 40);
  const ProjectedDesign design = project_onto_instruments(data);
  std::mt19937_64 rng = make_engine(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  DriveSpec spec;
  spec.rho = 0.37;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd beta(2);
    beta << normal(rng), normal(rng);
    const double lib = drive_objective(beta, design, spec);
    const double oracle =
        objective_oracle({beta(0), beta(1)}, design, spec.rho);
    CHECK(lib == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("q order outside (1, 2] is rejected") {
  const ProjectedDesign design = unit_design(20, 1.0);
  DriveSpec spec;
  spec.q_order = 2.5;
  CHECK_THROWS_AS(fit_drive(design, spec), ValidationError);
  spec.q_order = 1.0;
  CHECK_THROWS_AS(fit_drive(design, spec), ValidationError);
}

TEST_CASE("drive at rho zero equals tsls") {
  const IVDataset data = test_helpers::make_overidentified(400, 2, 1.0, 0.5, 42);
  const ProjectedDesign design = project_onto_instruments(data);
  const Estimate tsls = fit_tsls(design, data);
  DriveSpec spec;
  spec.rho = 0.0;
  const Estimate drive = fit_drive(design, spec);
  CHECK((tsls.beta - drive.beta).norm() <= 1e-8);
}

TEST_CASE("noiseless fit keeps the coefficient until the threshold") {
  const ProjectedDesign design = unit_design(100, 1.0);
  DriveSpec spec;
  spec.rho = 1.9;
  CHECK(fit_drive(design, spec).beta(0) == doctest::Approx(1.0).epsilon(1e-4));
  spec.rho = 5.0;
  CHECK(fit_drive(design, spec).beta(0) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("drive is consistent under the eigenvalue penalty bound") {
  DgpSpec spec;
  spec.gamma = 1.0;
  spec.sigma = 0.5;
  double prev_med = 1e9;
  for (int n : {500, 2000, 8000}) {
    std::vector<double> errs;
    for (int r = 0; r < 30; ++r) {
      DgpSpec s = spec;
      s.n = n;
      s.seed = 600 + r;
      const IVDataset data = generate_dgp(s);
      const ProjectedDesign design = project_onto_instruments(data);
      DriveSpec d;
      d.rho = 0.5 * rho_eigenvalue_rule(design, 1.0);
      errs.push_back(std::abs(fit_drive(design, d).beta(0) - 1.0));
    }
    std::sort(errs.begin(), errs.end());
    const double med = errs[errs.size() / 2];
    CHECK(med < prev_med + 1e-3);
    prev_med = med;
  }
  CHECK(prev_med < 0.05);
}

TEST_CASE("population limit returns beta0 below the eigenvalue bound") {
  PopulationLimit limit;
  limit.beta0 = Eigen::VectorXd::Ones(1);
  limit.gram = Eigen::MatrixXd::Identity(1, 1);
  limit.rho = 0.5;
  CHECK(solve_population_limit(limit)(0) == doctest::Approx(1.0).epsilon(1e-10));
  limit.rho = 5.0;
  CHECK(solve_population_limit(limit)(0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("population limit keeps a 2-d coefficient below the bound") {
  PopulationLimit limit;
  limit.beta0 = Eigen::VectorXd::Ones(2);
  limit.gram = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  limit.rho = 0.9;
  const Eigen::VectorXd beta = solve_population_limit(limit);
  CHECK((beta - limit.beta0).norm() <= 1e-8);

  // Dense grid-search confirmation around beta0.
  double best = 1e300;
  Eigen::Vector2d best_pt;
  for (int i = -60; i <= 60; ++i) {
    for (int j = -60; j <= 60; ++j) {
      Eigen::Vector2d pt(1.0 + i * 1e-3, 1.0 + j * 1e-3);
      const Eigen::Vector2d diff = pt - Eigen::Vector2d(1.0, 1.0);
      const double val =
          std::sqrt(diff.dot(limit.gram * diff)) +
          std::sqrt(limit.rho * (pt.squaredNorm() + 1.0));
      if (val < best) {
        best = val;
        best_pt = pt;
      }
    }
  }
  CHECK((best_pt - Eigen::Vector2d(1.0, 1.0)).norm() <= 1e-3 + 1e-12);
}

TEST_CASE("population shrinkage threshold in one dimension") {
  // With gram = lambda and |beta0| = b the minimizer stays at beta0 for all
  // rho <= lambda (1 + 1/b^2) and has strictly smaller norm above it.
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      PopulationLimit limit;
      limit.beta0 = Eigen::VectorXd::Constant(1, b);
      limit.gram = Eigen::MatrixXd::Constant(1, 1, lambda);
      const double threshold = lambda * (1.0 + 1.0 / (b * b));
      limit.rho = 0.999 * threshold;
      CHECK(std::abs(solve_population_limit(limit)(0) - b) <= 1e-8);
      limit.rho = threshold + 1e-3;
      CHECK(solve_population_limit(limit)(0) < b - 1e-6);
    }
  }
}

TEST_CASE("gmm with instrument moments equals drive") {
  const IVDataset data = test_helpers::make_overidentified(500, 3, 1.0, 0.5, 43);
  const ProjectedDesign design = project_onto_instruments(data);
  DriveSpec spec;
  spec.rho = 0.2;
  const Estimate drive = fit_drive(design, spec);
  const Estimate gmm = fit_sqrt_ridge_gmm(iv_moment_system(data), spec);
  CHECK((drive.beta - gmm.beta).norm() <= 1e-8);
}

TEST_CASE("gmm and drive objectives agree pointwise") {
  const IVDataset data = test_helpers::make_overidentified(200, 2, 1.0, 0.5, 44);
  const ProjectedDesign design = project_onto_instruments(data);
  const MomentSystem sys = iv_moment_system(data);
  std::mt19937_64 rng = make_engine(45);
  std::normal_distribution<double> normal(0.0, 1.0);
  DriveSpec spec;
  spec.rho = 0.6;
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, normal(rng));
    const Eigen::VectorXd gbar = sys.moment0 - sys.jacobian * beta;
    const double gmm_objective =
        std::sqrt(gbar.dot(sys.weight * gbar)) +
        std::sqrt(spec.rho * (beta.squaredNorm() + 1.0));
    CHECK(drive_objective(beta, design, spec) ==
          doctest::Approx(gmm_objective).epsilon(1e-12));
  }
}

TEST_CASE("gmm with ols moments recovers a noiseless coefficient") {
  IVDataset data = test_helpers::make_random(600, 2, 2, 46);
  Eigen::VectorXd beta0(2);
  beta0 << 1.0, -0.5;
  data.y = data.x * beta0;
  const MomentSystem sys = ols_moment_system(data);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.jacobian);
  DriveSpec spec;
  spec.rho = 0.9 * es.eigenvalues().minCoeff();
  const Estimate est = fit_sqrt_ridge_gmm(sys, spec);
  CHECK((est.beta - beta0).norm() <= 1e-6);
}

TEST_CASE("gmm at rho zero is the plain gmm point estimate") {
  const IVDataset data = test_helpers::make_overidentified(300, 2, 1.0, 0.5, 47);
  const MomentSystem sys = iv_moment_system(data);
  DriveSpec spec;
  spec.rho = 0.0;
  const Estimate est = fit_sqrt_ridge_gmm(sys, spec);
  // Normal equations of the quadratic GMM objective.
  const Eigen::MatrixXd a = sys.jacobian.transpose() * sys.weight * sys.jacobian;
  const Eigen::VectorXd b = sys.jacobian.transpose() * sys.weight * sys.moment0;
  CHECK((a * est.beta - b).norm() <= 1e-10);
}

TEST_CASE("gmm rejects a non-positive weight") {
  const IVDataset data = test_helpers::make_overidentified(100, 2, 1.0, 0.5, 48);
  MomentSystem sys = iv_moment_system(data);
  sys.weight(0, 0) = -1.0;
  CHECK_THROWS_AS(fit_sqrt_ridge_gmm(sys, {0.1}), NonPositiveWeight);
}

TEST_CASE("q-variant fits stay near the coefficient under the bound") {
  const IVDataset data = test_helpers::make_overidentified(8000, 2, 1.0, 0.5, 49);
  const ProjectedDesign design = project_onto_instruments(data);
  const double bound = rho_eigenvalue_rule(design, 1.0);
  for (double q : {1.25, 1.5, 2.0}) {
    DriveSpec spec;
    spec.rho = bound;
    spec.q_order = q;
    const Estimate est = fit_drive(design, spec);
    CHECK(std::abs(est.beta(0) - 1.0) <= 0.02);
  }
}

TEST_CASE("shrinkage path endpoints and monotone continuity") {
  const ProjectedDesign design = unit_design(100, 1.0);

  const auto single = drive_shrinkage_path(design, {0.0});
  CHECK(single.size() == 1);
  CHECK(single[0].second(0) == doctest::Approx(1.0).epsilon(1e-8));

  const auto path = drive_shrinkage_path(design, {0.0, 1.0, 1.9, 2.5, 5.0});
  CHECK(path[0].second(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(path[1].second(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(path[2].second(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(path[3].second(0) < 1.0 - 1e-4);
  CHECK(path[4].second(0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("shrinkage path is continuous under grid refinement") {
  const IVDataset data = test_helpers::make_overidentified(300, 2, 1.0, 0.5, 50);
  const ProjectedDesign design = project_onto_instruments(data);
  std::vector<double> fine;
  for (int i = 0; i <= 200; ++i) fine.push_back(0.02 * i);
  const auto path = drive_shrinkage_path(design, fine);
  for (std::size_t i = 1; i < path.size(); ++i) {
    CHECK((path[i].second - path[i - 1].second).norm() < 0.05);
  }
}

TEST_CASE("shrinkage path validates its grid") {
  const ProjectedDesign design = unit_design(20, 1.0);
  CHECK_THROWS_AS(drive_shrinkage_path(design, {}), ValidationError);
  CHECK_THROWS_AS(drive_shrinkage_path(design, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(drive_shrinkage_path(design, {1.0, 0.5}), ValidationError);
}

TEST_CASE("optimality certificate at the returned point") {
  const IVDataset data = test_helpers::make_overidentified(400, 3, 1.0, 0.5, 51);
  const ProjectedDesign design = project_onto_instruments(data);
  DriveSpec spec;
  spec.rho = 0.4;
  const Estimate est = fit_drive(design, spec);
  CHECK(est.diagnostics.gradient_norm <= spec.solver.grad_tol);
  const Eigen::VectorXd tsls = fit_tsls(design, data).beta;
  CHECK(drive_objective(est.beta, design, spec) <=
        drive_objective(tsls, design, spec) + 1e-12);
  CHECK(drive_objective(est.beta, design, spec) <=
        drive_objective(Eigen::VectorXd::Zero(1), design, spec) + 1e-12);
}
