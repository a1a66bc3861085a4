#include "driveiv/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "driveiv/drive.hpp"
#include "driveiv/errors.hpp"
#include "driveiv/estimators.hpp"
#include "driveiv/parallel.hpp"
#include "driveiv/projection.hpp"
#include "driveiv/rng.hpp"

namespace driveiv {

namespace {

void validate_dgp(const DgpSpec& spec) {
  if (spec.n < 10) throw ValidationError("dgp n must be at least 10");
  if (!(spec.sigma > 0.0)) throw ValidationError("dgp sigma must be positive");
}

double mse_of(const std::vector<double>& sq_errors) {
  return std::accumulate(sq_errors.begin(), sq_errors.end(), 0.0) /
         static_cast<double>(sq_errors.size());
}

double std_err_of(const std::vector<double>& sq_errors, double mean) {
  if (sq_errors.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : sq_errors) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(sq_errors.size() - 1);
  return std::sqrt(var / static_cast<double>(sq_errors.size()));
}

}  // namespace

IVDataset generate_dgp(const DgpSpec& spec) {
  validate_dgp(spec);
  std::mt19937_64 rng = make_engine(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  IVDataset data;
  data.y.resize(spec.n);
  data.x.resize(spec.n, 1);
  data.z.resize(spec.n, 1);
  for (int i = 0; i < spec.n; ++i) {
    const double u = normal(rng);
    const double eps_z = normal(rng);
    const double z = u * spec.beta_uz + eps_z;
    const double x = spec.gamma * z + u;
    data.z(i, 0) = z;
    data.x(i, 0) = x;
    data.y(i) = x * spec.beta0 + z * spec.eta + u;
  }
  return data;
}

EstimatorSpec EstimatorSpec::ols() { return {EstimatorKind::Ols}; }
EstimatorSpec EstimatorSpec::tsls() { return {EstimatorKind::Tsls}; }
EstimatorSpec EstimatorSpec::kclass(double kappa) {
  EstimatorSpec s{EstimatorKind::KClass};
  s.kappa = kappa;
  return s;
}
EstimatorSpec EstimatorSpec::tsls_ridge_cv() {
  return {EstimatorKind::TslsRidge};
}
EstimatorSpec EstimatorSpec::tsls_ridge_fixed(double rho) {
  EstimatorSpec s{EstimatorKind::TslsRidge};
  s.rho = rho;
  s.ridge_cv = false;
  return s;
}
EstimatorSpec EstimatorSpec::sqrt_ridge_ols(double rho) {
  EstimatorSpec s{EstimatorKind::SqrtRidgeOls};
  s.rho = rho;
  return s;
}
EstimatorSpec EstimatorSpec::drive() { return {EstimatorKind::Drive}; }

double select_ridge_rho_cv(const IVDataset& data, int folds,
                           const std::vector<double>& grid) {
  if (folds < 2) throw ValidationError("cv folds must be at least 2");
  if (grid.empty()) throw ValidationError("cv grid must be nonempty");
  const Eigen::Index n = data.n();
  const Eigen::Index fold_size = n / folds;
  if (fold_size < data.n_instruments() + 1)
    throw ValidationError("too few rows per cv fold");

  std::vector<double> cv_error(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index lo = f * fold_size;
    const Eigen::Index hi = (f + 1 == folds) ? n : lo + fold_size;
    const Eigen::Index n_test = hi - lo;
    const Eigen::Index n_train = n - n_test;
    IVDataset train;
    train.y.resize(n_train);
    train.x.resize(n_train, data.x.cols());
    train.z.resize(n_train, data.z.cols());
    Eigen::MatrixXd x_test(n_test, data.x.cols());
    Eigen::VectorXd y_test(n_test);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i >= lo && i < hi) {
        x_test.row(i - lo) = data.x.row(i);
        y_test(i - lo) = data.y(i);
      } else {
        train.y(r) = data.y(i);
        train.x.row(r) = data.x.row(i);
        train.z.row(r) = data.z.row(i);
        ++r;
      }
    }
    const ProjectedDesign design = project_onto_instruments(train);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const Estimate est = fit_tsls_ridge(design, train, {grid[gi]});
      cv_error[gi] +=
          (y_test - x_test * est.beta).squaredNorm() / static_cast<double>(n_test);
    }
  }
  const auto best =
      std::min_element(cv_error.begin(), cv_error.end()) - cv_error.begin();
  return grid[static_cast<std::size_t>(best)];
}

Estimate fit_estimator(const EstimatorSpec& spec, const IVDataset& data,
                       const ProjectedDesign& design, const RhoRule& rho_rule,
                       std::uint64_t seed) {
  switch (spec.kind) {
    case EstimatorKind::Ols:
      return fit_ols(data);
    case EstimatorKind::Tsls:
      return fit_tsls(design, data);
    case EstimatorKind::KClass:
      return fit_kclass(design, data, {spec.kappa});
    case EstimatorKind::TslsRidge: {
      const double rho =
          spec.ridge_cv ? select_ridge_rho_cv(data) : spec.rho;
      return fit_tsls_ridge(design, data, {rho});
    }
    case EstimatorKind::SqrtRidgeOls:
      return fit_sqrt_ridge_ols(data, {spec.rho}, spec.solver);
    case EstimatorKind::Drive: {
      RhoRule rule = rho_rule;
      if (rule.kind == RhoRule::Kind::BootstrapScoreQuantile)
        rule.bootstrap.seed = derive_seed(seed, {0xd21fu});
      DriveSpec drive;
      drive.rho = resolve_rho(rule, design, data, spec.solver);
      drive.solver = spec.solver;
      return fit_drive(design, drive);
    }
    case EstimatorKind::SqrtRidgeGmm:
      return fit_sqrt_ridge_gmm(iv_moment_system(data),
                                {spec.rho, 2.0, spec.solver});
  }
  throw ValidationError("unknown estimator kind");
}

std::vector<std::pair<double, double>> default_invalidity_grid() {
  return {{0.0, 0.0}, {0.4, 0.0}, {0.4, 0.4}, {0.4, 0.8},
          {0.8, 0.0}, {0.8, 0.4}, {0.8, 0.8}};
}

MseReport run_mse_experiment(
    const std::vector<std::pair<double, double>>& grid, const DgpSpec& base,
    const std::vector<EstimatorSpec>& estimators, int n_reps,
    const RhoRule& rho_rule, unsigned n_threads) {
  if (grid.empty()) throw ValidationError("grid must be nonempty");
  if (n_reps < 1) throw ValidationError("n_reps must be positive");
  if (estimators.empty()) throw ValidationError("estimator list is empty");

  MseReport report;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    DgpSpec spec = base;
    spec.eta = grid[cell].first;
    spec.beta_uz = grid[cell].second;

    // sq_errors[e][rep]: NaN marks a failed fit.
    std::vector<std::vector<double>> sq_errors(
        estimators.size(),
        std::vector<double>(static_cast<std::size_t>(n_reps),
                            std::numeric_limits<double>::quiet_NaN()));
    parallel_for(
        static_cast<std::size_t>(n_reps),
        [&](std::size_t rep) {
          DgpSpec rep_spec = spec;
          rep_spec.seed =
              derive_seed(base.seed, {(std::uint64_t)cell, (std::uint64_t)rep});
          const IVDataset data = generate_dgp(rep_spec);
          const ProjectedDesign design = project_onto_instruments(data);
          for (std::size_t e = 0; e < estimators.size(); ++e) {
            try {
              const Estimate est = fit_estimator(
                  estimators[e], data, design, rho_rule,
                  derive_seed(rep_spec.seed, {(std::uint64_t)e}));
              const double err = est.beta(0) - spec.beta0;
              sq_errors[e][rep] = err * err;
            } catch (const Error&) {
              // left as NaN; counted below
            }
          }
        },
        n_threads);

    for (std::size_t e = 0; e < estimators.size(); ++e) {
      std::vector<double> ok;
      ok.reserve(sq_errors[e].size());
      int failures = 0;
      for (double v : sq_errors[e]) {
        if (std::isnan(v))
          ++failures;
        else
          ok.push_back(v);
      }
      MseCell out;
      out.eta = spec.eta;
      out.beta_uz = spec.beta_uz;
      out.estimator = estimator_name(estimators[e].kind);
      out.n_reps = static_cast<int>(ok.size());
      out.n_failures = failures;
      if (!ok.empty()) {
        out.mse = mse_of(ok);
        out.std_err = std_err_of(ok, out.mse);
      } else {
        out.mse = std::numeric_limits<double>::quiet_NaN();
        out.std_err = std::numeric_limits<double>::quiet_NaN();
      }
      report.rows.push_back(std::move(out));
    }
  }
  return report;
}

Table MseReport::tidy_table() const {
  Table t;
  t.names = {"eta", "beta_uz", "estimator", "mse", "std_err", "n_reps",
             "n_failures"};
  t.columns.resize(t.names.size());
  for (const MseCell& row : rows) {
    t.columns[0].push_back(format_number(row.eta));
    t.columns[1].push_back(format_number(row.beta_uz));
    t.columns[2].push_back(row.estimator);
    t.columns[3].push_back(format_number(row.mse));
    t.columns[4].push_back(format_number(row.std_err));
    t.columns[5].push_back(std::to_string(row.n_reps));
    t.columns[6].push_back(std::to_string(row.n_failures));
  }
  return t;
}

Table MseReport::grid_table() const {
  std::vector<std::pair<double, double>> cells;
  std::vector<std::string> estimators;
  for (const MseCell& row : rows) {
    const std::pair<double, double> cell{row.eta, row.beta_uz};
    if (std::find(cells.begin(), cells.end(), cell) == cells.end())
      cells.push_back(cell);
    if (std::find(estimators.begin(), estimators.end(), row.estimator) ==
        estimators.end())
      estimators.push_back(row.estimator);
  }
  Table t;
  t.names = {"eta", "beta_uz"};
  for (const std::string& e : estimators) t.names.push_back(e);
  t.columns.resize(t.names.size());
  for (const auto& cell : cells) {
    t.columns[0].push_back(format_number(cell.first));
    t.columns[1].push_back(format_number(cell.second));
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      double mse = std::numeric_limits<double>::quiet_NaN();
      for (const MseCell& row : rows) {
        if (row.eta == cell.first && row.beta_uz == cell.second &&
            row.estimator == estimators[e]) {
          mse = row.mse;
          break;
        }
      }
      t.columns[2 + e].push_back(format_number(mse));
    }
  }
  return t;
}

std::string MseReport::to_json() const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MseCell& r = rows[i];
    if (i) out << ",";
    out << "{\"eta\":" << format_number(r.eta)
        << ",\"beta_uz\":" << format_number(r.beta_uz) << ",\"estimator\":\""
        << r.estimator << "\",\"mse\":" << format_number(r.mse)
        << ",\"std_err\":" << format_number(r.std_err)
        << ",\"n_reps\":" << r.n_reps << ",\"n_failures\":" << r.n_failures
        << "}";
  }
  out << "]";
  return out.str();
}

namespace {

struct SplitData {
  IVDataset train;
  Eigen::MatrixXd x_test;
  Eigen::VectorXd y_test;
};

SplitData build_split(const Table& data, const ShiftEvalSpec& spec) {
  if (spec.train_ranks.empty() || spec.test_ranks.empty())
    throw EmptyPartition("train and test rank lists must be nonempty");
  for (int r : spec.train_ranks)
    if (std::find(spec.test_ranks.begin(), spec.test_ranks.end(), r) !=
        spec.test_ranks.end())
      throw ValidationError("train and test ranks overlap");

  const std::size_t gcol = data.column_index(spec.group_column);
  const std::vector<double> split_var = data.numeric_column(spec.split_variable);
  const std::vector<double> target = data.numeric_column(spec.target);

  // Group means of the split variable, then ranks (1 = smallest mean).
  std::map<std::string, std::pair<double, int>> acc;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    auto& slot = acc[data.columns[gcol][i]];
    slot.first += split_var[i];
    slot.second += 1;
  }
  std::vector<std::pair<double, std::string>> ordered;
  for (const auto& [group, sum_count] : acc)
    ordered.emplace_back(sum_count.first / sum_count.second, group);
  std::sort(ordered.begin(), ordered.end());
  std::map<std::string, int> rank_of;
  for (std::size_t i = 0; i < ordered.size(); ++i)
    rank_of[ordered[i].second] = static_cast<int>(i) + 1;
  for (int r : spec.train_ranks)
    if (r < 1 || r > static_cast<int>(ordered.size()))
      throw ValidationError("train rank " + std::to_string(r) +
                            " out of range");
  for (int r : spec.test_ranks)
    if (r < 1 || r > static_cast<int>(ordered.size()))
      throw ValidationError("test rank " + std::to_string(r) + " out of range");

  std::vector<std::vector<double>> endo, inst;
  for (const std::string& c : spec.endogenous)
    endo.push_back(data.numeric_column(c));
  for (const std::string& c : spec.instruments)
    inst.push_back(data.numeric_column(c));

  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const int rank = rank_of[data.columns[gcol][i]];
    if (std::find(spec.train_ranks.begin(), spec.train_ranks.end(), rank) !=
        spec.train_ranks.end())
      train_rows.push_back(i);
    else if (std::find(spec.test_ranks.begin(), spec.test_ranks.end(), rank) !=
             spec.test_ranks.end())
      test_rows.push_back(i);
  }
  if (train_rows.empty() || test_rows.empty())
    throw EmptyPartition("train or test partition is empty");

  SplitData split;
  split.train.y.resize(train_rows.size());
  split.train.x.resize(train_rows.size(), endo.size());
  split.train.z.resize(train_rows.size(), inst.size());
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    split.train.y(r) = target[train_rows[r]];
    for (std::size_t j = 0; j < endo.size(); ++j)
      split.train.x(r, j) = endo[j][train_rows[r]];
    for (std::size_t j = 0; j < inst.size(); ++j)
      split.train.z(r, j) = inst[j][train_rows[r]];
  }
  split.x_test.resize(test_rows.size(), endo.size());
  split.y_test.resize(test_rows.size());
  for (std::size_t r = 0; r < test_rows.size(); ++r) {
    split.y_test(r) = target[test_rows[r]];
    for (std::size_t j = 0; j < endo.size(); ++j)
      split.x_test(r, j) = endo[j][test_rows[r]];
  }
  return split;
}

double test_mse_for(const EstimatorSpec& est, const IVDataset& train,
                    const Eigen::MatrixXd& x_test,
                    const Eigen::VectorXd& y_test, const RhoRule& rho_rule,
                    std::uint64_t seed) {
  const ProjectedDesign design = project_onto_instruments(train);
  const Estimate fit = fit_estimator(est, train, design, rho_rule, seed);
  return (y_test - x_test * fit.beta).squaredNorm() /
         static_cast<double>(y_test.size());
}

}  // namespace

ShiftReport run_shift_eval(const Table& data, const ShiftEvalSpec& spec,
                           const std::vector<EstimatorSpec>& estimators,
                           int n_boot, const RhoRule& rho_rule,
                           std::uint64_t seed) {
  if (estimators.empty()) throw ValidationError("estimator list is empty");
  if (n_boot < 0) throw ValidationError("n_boot must be nonnegative");
  const SplitData split = build_split(data, spec);

  ShiftReport report;
  report.n_train = static_cast<std::size_t>(split.train.n());
  report.n_test = static_cast<std::size_t>(split.y_test.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    ShiftCell cell;
    cell.estimator = estimator_name(estimators[e].kind);
    cell.test_mse =
        test_mse_for(estimators[e], split.train, split.x_test, split.y_test,
                     rho_rule, derive_seed(seed, {(std::uint64_t)e}));

    // Bootstrap standard error over training-set resamples.
    std::vector<double> boot_mses;
    boot_mses.reserve(static_cast<std::size_t>(n_boot));
    const Eigen::Index n_train = split.train.n();
    for (int b = 0; b < n_boot; ++b) {
      std::mt19937_64 rng = make_engine(
          derive_seed(seed, {0xb5eau, (std::uint64_t)e, (std::uint64_t)b}));
      std::uniform_int_distribution<Eigen::Index> pick(0, n_train - 1);
      IVDataset resampled;
      resampled.y.resize(n_train);
      resampled.x.resize(n_train, split.train.x.cols());
      resampled.z.resize(n_train, split.train.z.cols());
      for (Eigen::Index i = 0; i < n_train; ++i) {
        const Eigen::Index j = pick(rng);
        resampled.y(i) = split.train.y(j);
        resampled.x.row(i) = split.train.x.row(j);
        resampled.z.row(i) = split.train.z.row(j);
      }
      try {
        boot_mses.push_back(test_mse_for(
            estimators[e], resampled, split.x_test, split.y_test, rho_rule,
            derive_seed(seed, {0xb5ebu, (std::uint64_t)e, (std::uint64_t)b})));
      } catch (const Error&) {
        // resample skipped
      }
    }
    if (boot_mses.size() >= 2) {
      const double mean = mse_of(boot_mses);
      cell.std_err = std_err_of(boot_mses, mean) *
                     std::sqrt(static_cast<double>(boot_mses.size()));
    }
    report.rows.push_back(std::move(cell));
  }
  return report;
}

Table ShiftReport::table() const {
  Table t;
  t.names = {"estimator", "test_mse", "std_err"};
  t.columns.resize(t.names.size());
  for (const ShiftCell& row : rows) {
    t.columns[0].push_back(row.estimator);
    t.columns[1].push_back(format_number(row.test_mse));
    t.columns[2].push_back(format_number(row.std_err));
  }
  return t;
}

std::string ShiftReport::to_json() const {
  std::ostringstream out;
  out << "{\"n_train\":" << n_train << ",\"n_test\":" << n_test
      << ",\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ",";
    out << "{\"estimator\":\"" << rows[i].estimator
        << "\",\"test_mse\":" << format_number(rows[i].test_mse)
        << ",\"std_err\":" << format_number(rows[i].std_err) << "}";
  }
  out << "]}";
  return out.str();
}

}  // namespace driveiv
