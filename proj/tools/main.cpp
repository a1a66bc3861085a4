#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "driveiv/errors.hpp"

namespace {

using namespace driveiv_cli;

void add_io_flags(CLI::App* cmd, std::string& out, std::string& format,
                  std::uint64_t& seed) {
  cmd->add_option("--out", out, "Output path prefix (extension appended)");
  cmd->add_option("--format", format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", seed, "Master RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust instrumental-variables estimation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override");

  EstimateOptions est;
  auto* estimate = app.add_subcommand(
      "estimate", "Fit estimators on a CSV dataset");
  estimate->add_option("--data", est.data_path, "Input CSV path")->required();
  estimate->add_option("--outcome", est.outcome, "Outcome column")->required();
  estimate->add_option("--endogenous", est.endogenous, "Endogenous columns")
      ->required()
      ->delimiter(',');
  estimate->add_option("--instruments", est.instruments, "Instrument columns")
      ->required()
      ->delimiter(',');
  estimate->add_option("--estimator", est.estimators,
                       "Estimators: ols,tsls,kclass,tsls_ridge,sqrt_ridge_ols,drive")
      ->delimiter(',');
  estimate->add_option("--kappa", est.kappa, "k-class parameter in [0,1]");
  estimate->add_option("--ridge-rho", est.ridge_rho,
                       "Penalty for tsls_ridge / sqrt_ridge_ols");
  estimate->add_option("--rho-rule", est.rho_rule,
                       "drive penalty rule: eigenvalue[:c] | bootstrap[:c] | fixed:v");
  int estimate_reps = 1;
  estimate->add_option("--reps", estimate_reps,
                       "Accepted for interface uniformity; a fit is a single run");
  add_io_flags(estimate, est.out, est.format, est.seed);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand(
      "simulate", "MSE sweep over instrument-invalidity settings");
  simulate->add_option("--beta0", sim.beta0, "Structural coefficient");
  simulate->add_option("--gamma", sim.gamma, "First-stage coefficient");
  simulate->add_option("--sigma", sim.sigma, "Noise scale");
  simulate->add_option("--n", sim.n, "Sample size per replication");
  simulate->add_option("--reps", sim.reps, "Replications per grid cell");
  simulate->add_option("--grid", sim.grid,
                       "Cells as eta:beta_uz;... (default: built-in sweep)");
  simulate->add_option("--estimators", sim.estimators, "Comma list");
  simulate->add_option("--kappa", sim.kappa, "k-class parameter");
  simulate->add_option("--rho-rule", sim.rho_rule, "drive penalty rule");
  simulate->add_option("--boot-c-mult", sim.boot_c_mult,
                       "Bootstrap score multiplier");
  simulate->add_option("--boot-alpha", sim.boot_alpha,
                       "Bootstrap quantile level");
  simulate->add_option("--boot-n", sim.boot_n, "Bootstrap resamples");
  simulate->add_flag("--boot-root-n", sim.boot_root_n,
                     "Scale bootstrapped quantile by sqrt(n)");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
  add_io_flags(simulate, sim.out, sim.format, sim.seed);

  DualityOptions dual;
  auto* duality = app.add_subcommand(
      "duality-check", "Randomized agreement check of the worst-case value "
                       "closed form against its dual");
  duality->add_option("--instances,--reps", dual.instances,
                      "Random instances");
  duality->add_flag("--perturb", dual.perturb,
                    "Inject a fault (negative control; must exit 4)");
  duality->add_option("--tol", dual.tol, "Relative tolerance");
  add_io_flags(duality, dual.out, dual.format, dual.seed);

  AsymptoticsOptions asym;
  auto* asymptotics = app.add_subcommand(
      "asymptotics", "Sample the limiting laws and compare by KS distance");
  asymptotics->add_option("--beta0", asym.beta0, "Coefficient vector")
      ->delimiter(',');
  asymptotics->add_option("--gamma", asym.gamma,
                          "First-stage matrix, row-major d x p")
      ->delimiter(',');
  asymptotics->add_option("--sigma-z", asym.sigma_z_scale,
                          "Instrument covariance scale (times identity)");
  asymptotics->add_option("--sigma2", asym.sigma2, "Structural error variance");
  asymptotics->add_option("--rho", asym.rho, "Robustness radius");
  asymptotics->add_option("--draws,--reps", asym.draws, "Sample size");
  add_io_flags(asymptotics, asym.out, asym.format, asym.seed);

  ShiftEvalOptions shift;
  auto* shift_eval = app.add_subcommand(
      "shift-eval", "Train/test evaluation under ranked-group splits");
  shift_eval->add_option("--data", shift.data_path, "Input CSV path")
      ->required();
  shift_eval->add_option("--group-column", shift.group_column,
                         "Grouping column")
      ->required();
  shift_eval->add_option("--split-variable", shift.split_variable,
                         "Column whose group means define the ranking "
                         "(default: first endogenous)");
  shift_eval->add_option("--train-ranks", shift.train_ranks,
                         "1-based group ranks for training")
      ->required()
      ->delimiter(',');
  shift_eval->add_option("--test-ranks", shift.test_ranks,
                         "1-based group ranks for testing")
      ->required()
      ->delimiter(',');
  shift_eval->add_option("--outcome", shift.outcome, "Outcome column")
      ->required();
  shift_eval->add_option("--endogenous", shift.endogenous, "Endogenous columns")
      ->required()
      ->delimiter(',');
  shift_eval
      ->add_option("--instruments", shift.instruments, "Instrument columns")
      ->required()
      ->delimiter(',');
  shift_eval->add_option("--estimators", shift.estimators, "Comma list");
  shift_eval->add_option("--kappa", shift.kappa, "k-class parameter");
  shift_eval->add_option("--rho-rule", shift.rho_rule, "drive penalty rule");
  shift_eval->add_option("--boot,--reps", shift.boot,
                         "Bootstrap resamples for standard errors");
  add_io_flags(shift_eval, shift.out, shift.format, shift.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return cmd_estimate(est);
    if (simulate->parsed()) return cmd_simulate(sim);
    if (duality->parsed()) return cmd_duality_check(dual);
    if (asymptotics->parsed()) return cmd_asymptotics(asym);
    if (shift_eval->parsed()) return cmd_shift_eval(shift);
  } catch (const driveiv::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const driveiv::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
