#pragma once

#include <Eigen/Dense>
#include <vector>

namespace driveiv {

// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

// Linear-interpolation empirical quantile (type 7). q in [0, 1].
double empirical_quantile(std::vector<double> values, double q);

// Two-sample Kolmogorov-Smirnov statistic for scalar samples.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Critical value for the two-sample KS test at significance alpha.
double ks_critical_value(std::size_t m, std::size_t n, double alpha);

}  // namespace driveiv
