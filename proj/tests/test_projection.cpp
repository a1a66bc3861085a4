#include <doctest.h>

#include <cmath>

#include "driveiv/errors.hpp"
#include "driveiv/projection.hpp"
#include "driveiv/simulation.hpp"

#include "helpers.hpp"

using namespace driveiv;

TEST_CASE("validate_dataset accepts a well-formed dataset") {
  const IVDataset data = test_helpers::make_random(10, 1, 2, 1);
  CHECK_NOTHROW(validate_dataset(data));
}

TEST_CASE("validate_dataset rejects under-identified data") {
  const IVDataset data = test_helpers::make_random(10, 2, 1, 1);
  CHECK_THROWS_AS(validate_dataset(data), UnderIdentified);
}

TEST_CASE("validate_dataset rejects NaN entries") {
  IVDataset data = test_helpers::make_random(10, 1, 2, 1);
  data.y(3) = std::nan("");
  CHECK_THROWS_AS(validate_dataset(data), NonFinite);
}

TEST_CASE("validate_dataset rejects mismatched row counts") {
  IVDataset data = test_helpers::make_random(10, 1, 2, 1);
  data.z.conservativeResize(8, 2);
  CHECK_THROWS_AS(validate_dataset(data), DimensionMismatch);
}

TEST_CASE("projection is exact when x lies in the instrument span") {
  const int n = 40, d = 3;
  IVDataset data = test_helpers::make_random(n, 1, d, 2);
  Eigen::VectorXd gamma(d);
  gamma << 0.5, -1.0, 2.0;
  data.x.col(0) = data.z * gamma;
  data.y = data.x.col(0);
  const ProjectedDesign design = project_onto_instruments(data);
  CHECK((design.x_proj - data.x).norm() <= 1e-10 * data.x.norm());
}

TEST_CASE("projection is idempotent and residuals are orthogonal to z") {
  const IVDataset data = test_helpers::make_random(200, 2, 3, 3);
  const ProjectedDesign design = project_onto_instruments(data);

  IVDataset again = data;
  again.x = design.x_proj;
  again.y = design.y_proj;
  const ProjectedDesign twice = project_onto_instruments(again);
  CHECK((twice.x_proj - design.x_proj).norm() <=
        1e-10 * design.x_proj.norm());
  CHECK((twice.y_proj - design.y_proj).norm() <=
        1e-10 * design.y_proj.norm());

  const Eigen::MatrixXd x_cross =
      (data.x - design.x_proj).transpose() * data.z;
  const Eigen::MatrixXd y_cross =
      (data.y - design.y_proj).transpose() * data.z;
  CHECK(x_cross.cwiseAbs().maxCoeff() <= 1e-8 * data.n());
  CHECK(y_cross.cwiseAbs().maxCoeff() <= 1e-8 * data.n());
}

TEST_CASE("first-stage coefficient reproduces the projection") {
  const IVDataset data = test_helpers::make_random(300, 2, 4, 4);
  const ProjectedDesign design = project_onto_instruments(data);
  CHECK((data.z * design.gamma_hat - design.x_proj).norm() <=
        1e-8 * data.x.norm());
  CHECK(design.qr_rank == 4);
  CHECK((design.sigma_z_hat - design.sigma_z_hat.transpose()).norm() <= 1e-12);
}

TEST_CASE("first-stage estimate approaches the generating coefficient") {
  DgpSpec spec;
  spec.eta = 0.0;
  spec.beta_uz = 0.0;
  spec.gamma = 1.0;
  spec.sigma = 0.5;

  auto gamma_err = [&](int n, std::uint64_t seed) {
    DgpSpec s = spec;
    s.n = n;
    s.seed = seed;
    const ProjectedDesign design = project_onto_instruments(generate_dgp(s));
    return std::abs(design.gamma_hat(0, 0) - 1.0);
  };

  double err_small = 0.0, err_large = 0.0;
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    err_small += gamma_err(200, 100 + r);
    err_large += gamma_err(3200, 200 + r);
  }
  err_small /= reps;
  err_large /= reps;
  CHECK(err_small < 0.2);
  CHECK(err_large < err_small);
}

TEST_CASE("rank-deficient instruments are rejected") {
  IVDataset data = test_helpers::make_random(50, 1, 3, 5);
  data.z.col(2) = 2.0 * data.z.col(0) - data.z.col(1);
  CHECK_THROWS_AS(project_onto_instruments(data), RankDeficientInstruments);
}
