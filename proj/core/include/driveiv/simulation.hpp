#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driveiv/csv.hpp"
#include "driveiv/rho_selection.hpp"
#include "driveiv/types.hpp"

namespace driveiv {

// One-dimensional data generating process
//   Z = U beta_uz + eps_z, X = gamma Z + U, Y = X beta0 + Z eta + U,
// with U, eps_z iid N(0, sigma^2).
struct DgpSpec {
  double beta0 = 1.0;
  double gamma = 1.0;
  double eta = 0.0;
  double beta_uz = 0.0;
  double sigma = 0.5;
  int n = 2000;
  std::uint64_t seed = 0;
};

IVDataset generate_dgp(const DgpSpec& spec);

// Estimator configuration for the experiment harnesses. Drive entries take
// their penalty from the rho rule passed to the runner; TslsRidge selects
// its penalty by k-fold cross validation unless a fixed rho is given.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Tsls;
  double kappa = 1.0 - 1.0 / 7.0;
  double rho = 0.0;
  bool ridge_cv = true;
  SolverSettings solver;

  static EstimatorSpec ols();
  static EstimatorSpec tsls();
  static EstimatorSpec kclass(double kappa);
  static EstimatorSpec tsls_ridge_cv();
  static EstimatorSpec tsls_ridge_fixed(double rho);
  static EstimatorSpec sqrt_ridge_ols(double rho);
  static EstimatorSpec drive();
};

Estimate fit_estimator(const EstimatorSpec& spec, const IVDataset& data,
                       const ProjectedDesign& design, const RhoRule& rho_rule,
                       std::uint64_t seed);

// Selects a ridge penalty by k-fold cross validation on out-of-sample
// prediction error.
double select_ridge_rho_cv(const IVDataset& data, int folds = 5,
                           const std::vector<double>& grid = {
                               0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0});

struct MseCell {
  double eta = 0.0;
  double beta_uz = 0.0;
  std::string estimator;
  double mse = 0.0;
  double std_err = 0.0;
  int n_reps = 0;
  int n_failures = 0;
};

struct MseReport {
  std::vector<MseCell> rows;

  Table tidy_table() const;
  // Pivoted layout: one row per (eta, beta_uz), one column per estimator.
  Table grid_table() const;
  std::string to_json() const;
};

// The seven (eta, beta_uz) cells of the invalid-instrument sweep.
std::vector<std::pair<double, double>> default_invalidity_grid();

MseReport run_mse_experiment(
    const std::vector<std::pair<double, double>>& grid, const DgpSpec& base,
    const std::vector<EstimatorSpec>& estimators, int n_reps,
    const RhoRule& rho_rule, unsigned n_threads = 0);

// Train/test split by ranked group means: groups (values of group_column)
// are ordered by their mean of split_variable, and the 1-based rank lists
// pick the train and test partitions.
struct ShiftEvalSpec {
  std::string group_column;
  std::string split_variable;
  std::vector<int> train_ranks;
  std::vector<int> test_ranks;
  std::string target;
  std::vector<std::string> endogenous;
  std::vector<std::string> instruments;
};

struct ShiftCell {
  std::string estimator;
  double test_mse = 0.0;
  double std_err = 0.0;
};

struct ShiftReport {
  std::vector<ShiftCell> rows;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  Table table() const;
  std::string to_json() const;
};

ShiftReport run_shift_eval(const Table& data, const ShiftEvalSpec& spec,
                           const std::vector<EstimatorSpec>& estimators,
                           int n_boot, const RhoRule& rho_rule,
                           std::uint64_t seed);

}  // namespace driveiv
