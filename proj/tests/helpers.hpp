#pragma once

#include <cstdint>
#include <random>

#include "driveiv/projection.hpp"
#include "driveiv/rng.hpp"
#include "driveiv/types.hpp"

namespace test_helpers {

// Over-identified linear IV data: d instruments, one endogenous regressor,
// valid instruments (eta = beta_uz = 0 analogue of the scalar generator).
inline driveiv::IVDataset make_overidentified(int n, int d, double beta0,
                                              double noise_sd,
                                              std::uint64_t seed) {
  std::mt19937_64 rng = driveiv::make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  driveiv::IVDataset data;
  data.y.resize(n);
  data.x.resize(n, 1);
  data.z.resize(n, d);
  for (int i = 0; i < n; ++i) {
    double first_stage = 0.0;
    for (int j = 0; j < d; ++j) {
      data.z(i, j) = normal(rng);
      first_stage += data.z(i, j) / std::sqrt(static_cast<double>(d));
    }
    const double u = noise_sd * normal(rng);
    data.x(i, 0) = first_stage + u;
    data.y(i) = beta0 * data.x(i, 0) + u;
  }
  return data;
}

// Random well-conditioned dataset for generic checks.
inline driveiv::IVDataset make_random(int n, int p, int d, std::uint64_t seed) {
  std::mt19937_64 rng = driveiv::make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  driveiv::IVDataset data;
  data.y.resize(n);
  data.x.resize(n, p);
  data.z.resize(n, d);
  for (int i = 0; i < n; ++i) {
    data.y(i) = normal(rng);
    for (int j = 0; j < p; ++j) data.x(i, j) = normal(rng);
    for (int j = 0; j < d; ++j) data.z(i, j) = normal(rng);
  }
  return data;
}

}  // namespace test_helpers
