#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace driveiv_cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheckFailed = 4;

struct EstimateOptions {
  std::string data_path;
  std::string outcome;
  std::vector<std::string> endogenous;
  std::vector<std::string> instruments;
  std::vector<std::string> estimators = {"tsls"};
  double kappa = 1.0 - 1.0 / 7.0;
  double ridge_rho = 0.0;
  std::string rho_rule = "eigenvalue:0.5";
  std::string out = "estimate_report";
  std::string format = "csv";
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  double beta0 = 1.0;
  double gamma = 1.0;
  double sigma = 0.5;
  int n = 2000;
  int reps = 500;
  std::string grid;  // "eta:beta_uz;..." — empty means the default grid
  std::string estimators = "ols,tsls,kclass,tsls_ridge,drive";
  double kappa = 1.0 - 1.0 / 7.0;
  std::string rho_rule = "bootstrap";
  double boot_c_mult = 1.1;
  double boot_alpha = 0.05;
  int boot_n = 500;
  bool boot_root_n = false;
  std::string out = "mse_report";
  std::string format = "csv";
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct DualityOptions {
  int instances = 100;
  bool perturb = false;
  std::string out = "duality_report";
  std::string format = "csv";
  std::uint64_t seed = 0;
  double tol = 1e-6;
};

struct AsymptoticsOptions {
  std::vector<double> beta0 = {1.0};
  std::vector<double> gamma = {1.0};  // row-major d x p
  double sigma_z_scale = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;
  int draws = 10000;
  std::string out = "asymptotic_report";
  std::string format = "csv";
  std::uint64_t seed = 0;
};

struct ShiftEvalOptions {
  std::string data_path;
  std::string group_column;
  std::string split_variable;
  std::vector<int> train_ranks;
  std::vector<int> test_ranks;
  std::string outcome;
  std::vector<std::string> endogenous;
  std::vector<std::string> instruments;
  std::string estimators = "ols,tsls,kclass,tsls_ridge,drive";
  double kappa = 1.0 - 1.0 / 7.0;
  std::string rho_rule = "bootstrap";
  int boot = 10;
  std::string out = "shift_report";
  std::string format = "csv";
  std::uint64_t seed = 0;
};

int cmd_estimate(const EstimateOptions& opts);
int cmd_simulate(const SimulateOptions& opts);
int cmd_duality_check(const DualityOptions& opts);
int cmd_asymptotics(const AsymptoticsOptions& opts);
int cmd_shift_eval(const ShiftEvalOptions& opts);

}  // namespace driveiv_cli
