#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "driveiv/asymptotics.hpp"
#include "driveiv/csv.hpp"
#include "driveiv/drive.hpp"
#include "driveiv/errors.hpp"
#include "driveiv/estimators.hpp"
#include "driveiv/projection.hpp"
#include "driveiv/rho_selection.hpp"
#include "driveiv/rng.hpp"
#include "driveiv/simulation.hpp"
#include "driveiv/stats.hpp"
#include "driveiv/wasserstein.hpp"

namespace driveiv_cli {

namespace {

using namespace driveiv;

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

RhoRule parse_rho_rule(const std::string& text, double c_mult, double alpha,
                       int n_boot, bool root_n, std::uint64_t seed) {
  if (text.rfind("eigenvalue:", 0) == 0)
    return RhoRule::eigenvalue_fraction(std::stod(text.substr(11)));
  if (text == "eigenvalue") return RhoRule::eigenvalue_fraction(0.5);
  if (text.rfind("fixed:", 0) == 0)
    return RhoRule::fixed_value(std::stod(text.substr(6)));
  if (text == "bootstrap" || text.rfind("bootstrap:", 0) == 0) {
    BootstrapSettings bs;
    bs.c_mult = c_mult;
    bs.alpha = alpha;
    bs.n_boot = n_boot;
    bs.root_n_scaling = root_n;
    bs.seed = seed;
    if (text.rfind("bootstrap:", 0) == 0)
      bs.c_mult = std::stod(text.substr(10));
    return RhoRule::bootstrap_score(bs);
  }
  throw ValidationError("unrecognized rho rule '" + text +
                        "' (expected eigenvalue[:c], bootstrap[:c], fixed:v)");
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "ols") return EstimatorKind::Ols;
  if (name == "tsls") return EstimatorKind::Tsls;
  if (name == "kclass" || name == "anchor") return EstimatorKind::KClass;
  if (name == "tsls_ridge" || name == "tsls-ridge")
    return EstimatorKind::TslsRidge;
  if (name == "sqrt_ridge_ols" || name == "sqrt-ridge")
    return EstimatorKind::SqrtRidgeOls;
  if (name == "drive") return EstimatorKind::Drive;
  throw ValidationError("unrecognized estimator '" + name + "'");
}

std::vector<EstimatorSpec> parse_estimator_list(const std::string& list,
                                                double kappa,
                                                double ridge_rho_fixed = -1.0) {
  std::vector<EstimatorSpec> specs;
  for (const std::string& name : split_list(list)) {
    EstimatorSpec spec;
    spec.kind = parse_estimator(name);
    spec.kappa = kappa;
    if (spec.kind == EstimatorKind::TslsRidge && ridge_rho_fixed >= 0.0) {
      spec.rho = ridge_rho_fixed;
      spec.ridge_cv = false;
    }
    specs.push_back(spec);
  }
  return specs;
}

void write_table(const Table& table, const std::string& out,
                 const std::string& format) {
  if (format == "csv") {
    write_csv(table, out + ".csv");
  } else if (format == "json") {
    std::ofstream f(out + ".json", std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + out + ".json'");
    f << "[";
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
      if (i) f << ",";
      f << "{";
      for (std::size_t j = 0; j < table.names.size(); ++j) {
        if (j) f << ",";
        f << "\"" << table.names[j] << "\":\"" << table.columns[j][i] << "\"";
      }
      f << "}";
    }
    f << "]";
  } else {
    throw ValidationError("unrecognized format '" + format + "'");
  }
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

}  // namespace

int cmd_estimate(const EstimateOptions& opts) {
  const Table raw = read_csv(opts.data_path);
  const std::vector<double> y = raw.numeric_column(opts.outcome);
  IVDataset data;
  data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  data.x.resize(y.size(), opts.endogenous.size());
  data.z.resize(y.size(), opts.instruments.size());
  for (std::size_t j = 0; j < opts.endogenous.size(); ++j) {
    const std::vector<double> col = raw.numeric_column(opts.endogenous[j]);
    data.x.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), col.size());
  }
  for (std::size_t j = 0; j < opts.instruments.size(); ++j) {
    const std::vector<double> col = raw.numeric_column(opts.instruments[j]);
    data.z.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), col.size());
  }
  validate_dataset(data);
  const ProjectedDesign design = project_onto_instruments(data);
  const RhoRule rule =
      parse_rho_rule(opts.rho_rule, 1.1, 0.05, 500, false, opts.seed);

  Table report;
  report.names = {"estimator", "coef_index", "beta",     "rho",
                  "kappa",     "iterations", "grad_norm", "objective"};
  report.columns.resize(report.names.size());
  std::cout << "estimator  beta  (rho/kappa)\n";
  for (const std::string& name : opts.estimators) {
    EstimatorSpec spec;
    spec.kind = parse_estimator(name);
    spec.kappa = opts.kappa;
    if (spec.kind == EstimatorKind::TslsRidge) {
      spec.rho = opts.ridge_rho;
      spec.ridge_cv = false;
    }
    if (spec.kind == EstimatorKind::SqrtRidgeOls) spec.rho = opts.ridge_rho;
    const Estimate est = fit_estimator(spec, data, design, rule, opts.seed);
    std::ostringstream betas;
    for (Eigen::Index i = 0; i < est.beta.size(); ++i) {
      report.columns[0].push_back(estimator_name(est.kind));
      report.columns[1].push_back(std::to_string(i));
      report.columns[2].push_back(format_number(est.beta(i)));
      report.columns[3].push_back(est.rho ? format_number(*est.rho) : "");
      report.columns[4].push_back(est.kappa ? format_number(*est.kappa) : "");
      report.columns[5].push_back(std::to_string(est.diagnostics.iterations));
      report.columns[6].push_back(format_number(est.diagnostics.gradient_norm));
      report.columns[7].push_back(format_number(est.diagnostics.objective));
      betas << (i ? " " : "") << format_number(est.beta(i));
    }
    std::cout << estimator_name(est.kind) << "  " << betas.str();
    if (est.rho) std::cout << "  rho=" << format_number(*est.rho);
    if (est.kappa) std::cout << "  kappa=" << format_number(*est.kappa);
    std::cout << "\n";
  }
  write_table(report, opts.out, opts.format);
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& opts) {
  DgpSpec base;
  base.beta0 = opts.beta0;
  base.gamma = opts.gamma;
  base.sigma = opts.sigma;
  base.n = opts.n;
  base.seed = opts.seed;

  std::vector<std::pair<double, double>> grid;
  if (opts.grid.empty()) {
    grid = default_invalidity_grid();
  } else {
    for (const std::string& cell : split_list(opts.grid, ';')) {
      const auto parts = split_list(cell, ':');
      if (parts.size() != 2)
        throw ValidationError("grid cell '" + cell +
                              "' must look like eta:beta_uz");
      grid.emplace_back(std::stod(parts[0]), std::stod(parts[1]));
    }
  }
  const RhoRule rule =
      parse_rho_rule(opts.rho_rule, opts.boot_c_mult, opts.boot_alpha,
                     opts.boot_n, opts.boot_root_n, opts.seed);
  const std::vector<EstimatorSpec> estimators =
      parse_estimator_list(opts.estimators, opts.kappa);

  const MseReport report = run_mse_experiment(grid, base, estimators,
                                              opts.reps, rule, opts.threads);
  if (opts.format == "json")
    write_text(report.to_json(), opts.out + ".json");
  else
    write_table(report.grid_table(), opts.out, opts.format);
  write_table(report.tidy_table(), opts.out + "_tidy", "csv");
  std::cout << to_csv_string(report.grid_table());
  return kExitOk;
}

int cmd_duality_check(const DualityOptions& opts) {
  if (opts.instances < 1)
    throw ValidationError("instances must be positive");
  Table report;
  report.names = {"instance", "n",          "p",         "d",
                  "rho",      "l_iv",       "primal",    "dual",
                  "gap",      "transport",  "transport_err"};
  report.columns.resize(report.names.size());

  double max_gap = 0.0;
  double max_transport_err = 0.0;
  for (int inst = 0; inst < opts.instances; ++inst) {
    std::mt19937_64 rng =
        make_engine(derive_seed(opts.seed, {(std::uint64_t)inst}));
    std::uniform_int_distribution<int> pick_p(1, 2);
    const int p = pick_p(rng);
    std::uniform_int_distribution<int> pick_d(p, 3);
    const int d = pick_d(rng);
    std::uniform_int_distribution<int> pick_n(std::max(8, d + 2), 50);
    const int n = pick_n(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> pick_rho(0.01, 5.0);
    const double rho = pick_rho(rng);

    IVDataset data;
    data.y.resize(n);
    data.x.resize(n, p);
    data.z.resize(n, d);
    for (int i = 0; i < n; ++i) {
      data.y(i) = normal(rng);
      for (int j = 0; j < p; ++j) data.x(i, j) = normal(rng);
      for (int j = 0; j < d; ++j) data.z(i, j) = normal(rng);
    }
    const ProjectedDesign design = project_onto_instruments(data);
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta(j) = normal(rng);

    const double primal = worst_case_value(design, beta, rho);
    double dual = worst_case_value_dual(design, beta, rho);
    if (opts.perturb) dual *= 1.01;  // fault injection for the negative control
    const double gap = std::abs(primal - dual) / (1.0 + std::abs(primal));

    const Eigen::MatrixXd samples = worst_case_samples(design, beta, rho);
    Eigen::MatrixXd base(n, p + 1);
    base.leftCols(p) = design.x_proj;
    base.col(p) = design.y_proj;
    const double transport =
        (samples - base).rowwise().squaredNorm().mean();
    const double transport_err = std::abs(transport - rho);

    const double l_iv =
        (design.y_proj - design.x_proj * beta).squaredNorm() / n;
    max_gap = std::max(max_gap, gap);
    max_transport_err = std::max(max_transport_err, transport_err);

    report.columns[0].push_back(std::to_string(inst));
    report.columns[1].push_back(std::to_string(n));
    report.columns[2].push_back(std::to_string(p));
    report.columns[3].push_back(std::to_string(d));
    report.columns[4].push_back(format_number(rho));
    report.columns[5].push_back(format_number(l_iv));
    report.columns[6].push_back(format_number(primal));
    report.columns[7].push_back(format_number(dual));
    report.columns[8].push_back(format_number(gap));
    report.columns[9].push_back(format_number(transport));
    report.columns[10].push_back(format_number(transport_err));

    if (opts.instances == 1) {
      std::cout << "l_iv=" << format_number(l_iv)
                << " rho=" << format_number(rho)
                << " primal=" << format_number(primal)
                << " dual=" << format_number(dual) << "\n";
    }
  }
  write_table(report, opts.out, opts.format);
  std::cout << "instances=" << opts.instances
            << " max_relative_gap=" << format_number(max_gap)
            << " max_transport_err=" << format_number(max_transport_err)
            << "\n";
  const bool ok = max_gap <= opts.tol && max_transport_err <= opts.tol;
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_asymptotics(const AsymptoticsOptions& opts) {
  AsymptoticSpec spec;
  const auto p = static_cast<Eigen::Index>(opts.beta0.size());
  if (opts.gamma.size() % opts.beta0.size() != 0)
    throw ValidationError("gamma length must be a multiple of beta0 length");
  const auto d = static_cast<Eigen::Index>(opts.gamma.size() / opts.beta0.size());
  spec.beta0 = Eigen::Map<const Eigen::VectorXd>(opts.beta0.data(), p);
  spec.gamma.resize(d, p);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      spec.gamma(i, j) = opts.gamma[static_cast<std::size_t>(i * p + j)];
  spec.sigma_z = opts.sigma_z_scale * Eigen::MatrixXd::Identity(d, d);
  spec.sigma2_eps = opts.sigma2;
  spec.rho = opts.rho;
  spec.n_draws = opts.draws;
  spec.seed = opts.seed;

  const Eigen::MatrixXd tsls = sample_tsls_asymptotic(spec);
  const AsymptoticSample drive = sample_drive_asymptotic(spec);
  const Eigen::VectorXd ks = ks_distance(drive.draws, tsls);
  const double crit = ks_critical_value(
      static_cast<std::size_t>(drive.draws.rows()),
      static_cast<std::size_t>(tsls.rows()), 0.01);

  Table report;
  report.names = {"coordinate", "ks", "critical_1pct", "laws_differ"};
  report.columns.resize(report.names.size());
  bool any_above = false;
  for (Eigen::Index j = 0; j < ks.size(); ++j) {
    report.columns[0].push_back(std::to_string(j));
    report.columns[1].push_back(format_number(ks(j)));
    report.columns[2].push_back(format_number(crit));
    report.columns[3].push_back(ks(j) > crit ? "yes" : "no");
    any_above = any_above || ks(j) > crit;
  }
  write_table(report, opts.out, opts.format);

  Table draws;
  draws.names.clear();
  for (Eigen::Index j = 0; j < p; ++j) {
    draws.names.push_back("drive_" + std::to_string(j));
    draws.names.push_back("tsls_" + std::to_string(j));
  }
  draws.columns.resize(draws.names.size());
  for (Eigen::Index i = 0; i < drive.draws.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      draws.columns[2 * j].push_back(format_number(drive.draws(i, j)));
      draws.columns[2 * j + 1].push_back(format_number(tsls(i, j)));
    }
  }
  write_table(draws, opts.out + "_samples", "csv");

  std::cout << "ks=" << format_number(ks.maxCoeff())
            << " critical=" << format_number(crit)
            << (any_above ? " laws differ" : " laws coincide") << "\n";
  if (drive.rho_out_of_range)
    std::cout << "warning: rho exceeds lambda_min(gamma' sigma_z gamma)\n";
  if (drive.n_failed > 0)
    std::cout << "warning: " << drive.n_failed << " draws flagged\n";
  return kExitOk;
}

int cmd_shift_eval(const ShiftEvalOptions& opts) {
  const Table data = read_csv(opts.data_path);
  ShiftEvalSpec spec;
  spec.group_column = opts.group_column;
  spec.split_variable =
      opts.split_variable.empty() && !opts.endogenous.empty()
          ? opts.endogenous.front()
          : opts.split_variable;
  spec.train_ranks = opts.train_ranks;
  spec.test_ranks = opts.test_ranks;
  spec.target = opts.outcome;
  spec.endogenous = opts.endogenous;
  spec.instruments = opts.instruments;

  const RhoRule rule =
      parse_rho_rule(opts.rho_rule, 1.1, 0.05, 500, false, opts.seed);
  const std::vector<EstimatorSpec> estimators =
      parse_estimator_list(opts.estimators, opts.kappa);
  const ShiftReport report =
      run_shift_eval(data, spec, estimators, opts.boot, rule, opts.seed);
  if (opts.format == "json")
    write_text(report.to_json(), opts.out + ".json");
  else
    write_table(report.table(), opts.out, opts.format);
  std::cout << "train=" << report.n_train << " test=" << report.n_test << "\n"
            << to_csv_string(report.table());
  return kExitOk;
}

}  // namespace driveiv_cli
