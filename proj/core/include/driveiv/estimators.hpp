#pragma once

#include "driveiv/solver.hpp"
#include "driveiv/types.hpp"

namespace driveiv {

// k-class interpolation parameter. kappa = 0 reproduces OLS, kappa = 1
// reproduces TSLS; anchor regression's gamma maps via kappa = 1 - 1/gamma.
struct KClassSpec {
  double kappa = 1.0;
};

double kappa_from_anchor_gamma(double gamma);

struct RidgeSpec {
  double rho = 0.0;
};

Estimate fit_ols(const IVDataset& data);

Estimate fit_tsls(const ProjectedDesign& design, const IVDataset& data);

Estimate fit_kclass(const ProjectedDesign& design, const IVDataset& data,
                    const KClassSpec& spec);
Estimate fit_kclass(const IVDataset& data, const KClassSpec& spec);

Estimate fit_tsls_ridge(const ProjectedDesign& design, const IVDataset& data,
                        const RidgeSpec& spec);

// Square-root-ridge regression on the raw (unprojected) data; shares the
// solver used by fit_drive.
Estimate fit_sqrt_ridge_ols(const IVDataset& data, const RidgeSpec& spec,
                            const SolverSettings& settings = {});

}  // namespace driveiv
