// Acceptance suite: every release gate in one binary, one pass/fail line per
// criterion, nonzero exit when any gate fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "driveiv/asymptotics.hpp"
#include "driveiv/drive.hpp"
#include "driveiv/errors.hpp"
#include "driveiv/estimators.hpp"
#include "driveiv/projection.hpp"
#include "driveiv/rho_selection.hpp"
#include "driveiv/rng.hpp"
#include "driveiv/simulation.hpp"
#include "driveiv/solver.hpp"
#include "driveiv/stats.hpp"
#include "driveiv/wasserstein.hpp"

using namespace driveiv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// --- 1. Worst-case duality: closed form vs dual search vs transport cost ---
Outcome duality_equivalence() {
  Outcome out;
  std::uint64_t master = 20260810;
  double max_gap = 0.0, max_budget_err = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    std::mt19937_64 rng = make_engine(derive_seed(master, {(std::uint64_t)inst}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> pick_p(1, 2);
    const int p = pick_p(rng);
    std::uniform_int_distribution<int> pick_d(p, 3);
    const int d = pick_d(rng);
    std::uniform_int_distribution<int> pick_n(d + 4, 50);
    const int n = pick_n(rng);
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
    const double dual = worst_case_value_dual(design, beta, rho);
    max_gap = std::max(max_gap, std::abs(primal - dual) / (1.0 + primal));

    const Eigen::MatrixXd samples = worst_case_samples(design, beta, rho);
    Eigen::MatrixXd base(n, p + 1);
    base.leftCols(p) = design.x_proj;
    base.col(p) = design.y_proj;
    const double transport = (samples - base).rowwise().squaredNorm().mean();
    max_budget_err = std::max(max_budget_err, std::abs(transport - rho));
  }
  out.require(max_gap <= 1e-6, "duality gap " + fmt(max_gap));
  out.require(max_budget_err <= 1e-6, "transport error " + fmt(max_budget_err));
  out.detail = "gap " + fmt(max_gap) + ", transport err " + fmt(max_budget_err);
  return out;
}

// --- 2. Conditional-shift closed forms via Monte Carlo ---
Outcome shift_formulas() {
  Outcome out;
  const int draws = 100000;
  struct Case {
    SimpleIVModel a, b;
    double expected;
    const char* name;
  };
  std::vector<Case> cases(3);
  cases[0].a.eta = 0.4;
  cases[0].expected = 0.319153824321146;
  cases[0].name = "direct-effect";
  cases[1].a.gamma = 1.0;
  cases[1].b.gamma = 0.0;
  cases[1].expected = 1.12837916709551;
  cases[1].name = "instrument-strength";
  cases[2].a.hetero_alpha = 0.5;
  cases[2].expected = 0.892062058076386;
  cases[2].name = "heteroskedastic";
  std::string detail;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const double mc =
        expected_conditional_shift(cases[c].a, cases[c].b, draws, 71 + c);
    // W2(z) is proportional to |z|, so the per-draw sd is
    // expected * sqrt(pi/2 - 1).
    const double se = cases[c].expected *
                      std::sqrt((M_PI / 2.0 - 1.0) / draws);
    out.require(std::abs(mc - cases[c].expected) <= 3.0 * se,
                std::string(cases[c].name) + " off by " +
                    fmt(std::abs(mc - cases[c].expected)) + " (3se " +
                    fmt(3.0 * se) + ")");
    detail += std::string(c ? ", " : "") + cases[c].name + " " + fmt(mc);
  }
  out.detail = detail;
  return out;
}

// --- 3. Delayed shrinkage of the population limit ---
Outcome delayed_shrinkage() {
  Outcome out;
  PopulationLimit limit;
  limit.beta0 = Eigen::VectorXd::Ones(1);
  limit.gram = Eigen::MatrixXd::Identity(1, 1);
  for (double rho : {0.5, 1.0, 1.9}) {
    limit.rho = rho;
    const double beta = solve_population_limit(limit)(0);
    out.require(std::abs(beta - 1.0) <= 1e-4,
                "rho " + fmt(rho) + " returned " + fmt(beta));
  }
  limit.rho = 5.0;
  const double shrunk = solve_population_limit(limit)(0);
  out.require(std::abs(shrunk - 0.5) <= 1e-4,
              "rho 5 returned " + fmt(shrunk));
  out.detail = "rho<=1.9 pinned at 1, rho=5 -> " + fmt(shrunk);
  return out;
}

// --- 4. Consistency with a non-vanishing penalty ---
Outcome nonvanishing_rho_consistency() {
  Outcome out;
  DgpSpec spec;
  spec.gamma = 1.0;
  spec.sigma = 0.5;
  double prev_med = 1e300;
  std::string detail;
  for (int n : {500, 2000, 8000}) {
    std::vector<double> errs;
    for (int r = 0; r < 100; ++r) {
      DgpSpec s = spec;
      s.n = n;
      s.seed = derive_seed(31, {(std::uint64_t)n, (std::uint64_t)r});
      const IVDataset data = generate_dgp(s);
      const ProjectedDesign design = project_onto_instruments(data);
      DriveSpec d;
      d.rho = 0.5 * rho_eigenvalue_rule(design, 1.0);
      errs.push_back(std::abs(fit_drive(design, d).beta(0) - 1.0));
    }
    const double med = median(errs);
    out.require(med < prev_med, "median not decreasing at n " + fmt(n));
    prev_med = med;
    detail += "n" + std::to_string(n) + " med " + fmt(med) + " ";
  }
  out.require(prev_med < 0.05, "final median " + fmt(prev_med));
  out.detail = detail;
  return out;
}

// --- 5. MSE grid ordering across invalidity settings ---
Outcome mse_grid_ordering() {
  Outcome out;
  DgpSpec base;
  base.beta0 = 1.0;
  // The published design leaves the first stage unstated; gamma = 0.15
  // puts the baseline estimator's sampling MSE at n = 2000 in the target
  // band. The bootstrap penalty uses the sqrt(n)-scaled quantile map with
  // c = 0.66 (see README notes on penalty scaling).
  base.gamma = 0.15;
  base.sigma = 0.5;
  base.n = 2000;
  base.seed = 20260810;
  BootstrapSettings bs;
  bs.c_mult = 0.66;
  bs.root_n_scaling = true;
  const RhoRule rule = RhoRule::bootstrap_score(bs);
  const std::vector<EstimatorSpec> ests = {
      EstimatorSpec::ols(), EstimatorSpec::tsls(),
      EstimatorSpec::kclass(1.0 - 1.0 / 7.0), EstimatorSpec::tsls_ridge_cv(),
      EstimatorSpec::drive()};
  const MseReport report =
      run_mse_experiment(default_invalidity_grid(), base, ests, 500, rule);

  const auto cell = [&](std::size_t c, std::size_t e) {
    return report.rows[5 * c + e].mse;
  };
  const double tsls_valid = cell(0, 1);
  const double drive_valid = cell(0, 4);
  out.require(tsls_valid >= 0.01 && tsls_valid <= 0.06,
              "tsls valid-cell mse " + fmt(tsls_valid));
  out.require(std::abs(drive_valid - tsls_valid) <= 0.2 * tsls_valid,
              "drive valid-cell mse " + fmt(drive_valid) + " vs tsls " +
                  fmt(tsls_valid));
  for (std::size_t c = 1; c < 7; ++c) {
    const double drive = cell(c, 4);
    const double others =
        std::min(std::min(cell(c, 0), cell(c, 1)),
                 std::min(cell(c, 2), cell(c, 3)));
    out.require(drive <= others,
                "row " + std::to_string(c) + " drive " + fmt(drive) +
                    " vs best other " + fmt(others));
  }
  for (const MseCell& row : report.rows)
    out.require(row.n_failures == 0,
                row.estimator + " failures " + std::to_string(row.n_failures));
  out.detail = "tsls(0,0) " + fmt(tsls_valid) + ", drive(0,0) " +
               fmt(drive_valid) + ", drive row-min on invalid rows";
  return out;
}

// --- 6. Asymptotic-law coincidence and separation ---
Outcome asymptotic_coincidence() {
  Outcome out;
  const int draws = 10000;
  const double crit = ks_critical_value(draws, draws, 0.01);

  AsymptoticSpec scalar;
  scalar.beta0 = Eigen::VectorXd::Ones(1);
  scalar.gamma = Eigen::MatrixXd::Identity(1, 1);
  scalar.sigma_z = Eigen::MatrixXd::Identity(1, 1);
  scalar.n_draws = draws;

  scalar.rho = 0.0;
  scalar.seed = 41;
  double ks0 =
      ks_distance(sample_drive_asymptotic(scalar).draws,
                  sample_tsls_asymptotic(scalar))(0);
  out.require(ks0 < crit, "rho=0 ks " + fmt(ks0));

  scalar.rho = 0.9;
  scalar.seed = 42;
  double ks1 =
      ks_distance(sample_drive_asymptotic(scalar).draws,
                  sample_tsls_asymptotic(scalar))(0);
  out.require(ks1 < crit, "scalar rho=0.9 ks " + fmt(ks1));

  AsymptoticSpec zero;
  zero.beta0 = Eigen::VectorXd::Zero(1);
  zero.gamma = Eigen::MatrixXd::Ones(2, 1) / std::sqrt(2.0);
  zero.sigma_z = Eigen::MatrixXd::Identity(2, 2);
  zero.rho = 0.4;
  zero.n_draws = draws;
  zero.seed = 43;
  double ks2 = ks_distance(sample_drive_asymptotic(zero).draws,
                           sample_tsls_asymptotic(zero))(0);
  out.require(ks2 < crit, "beta0=0 ks " + fmt(ks2));

  AsymptoticSpec control;
  control.beta0 = Eigen::VectorXd(2);
  control.beta0 << 1.0, 0.5;
  control.gamma = Eigen::MatrixXd(3, 2);
  control.gamma << 1, 0, 0, 1, 0.3, 0.3;
  control.sigma_z = Eigen::MatrixXd::Identity(3, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      control.gamma.transpose() * control.gamma);
  control.rho = 0.5 * es.eigenvalues().minCoeff();
  control.n_draws = draws;
  control.seed = 44;
  const AsymptoticSample robust = sample_drive_asymptotic(control);
  const double ks3 =
      ks_distance(robust.draws, sample_tsls_asymptotic(control)).maxCoeff();
  out.require(ks3 > crit, "2-d control ks " + fmt(ks3) + " not above " +
                              fmt(crit));
  out.require(robust.n_failed == 0, "control draws failed");
  out.detail = "coincide ks " + fmt(std::max(std::max(ks0, ks1), ks2)) +
               " < " + fmt(crit) + ", control ks " + fmt(ks3);
  return out;
}

// --- 7. Bootstrap penalty behavior ---
Outcome bootstrap_rho_behavior() {
  Outcome out;
  // Initialization independence.
  DgpSpec spec;
  spec.gamma = 0.15;
  spec.sigma = 0.5;
  spec.n = 2000;
  spec.seed = 51;
  const IVDataset data = generate_dgp(spec);
  const ProjectedDesign design = project_onto_instruments(data);
  BootstrapSettings bs;
  bs.seed = 52;
  const double from_tsls =
      rho_bootstrap_iterative(design, data, bs, fit_tsls(design, data)).rho;
  const double from_ols =
      rho_bootstrap_iterative(design, data, bs, fit_ols(data)).rho;
  out.require(std::abs(from_tsls - from_ols) < 1e-4,
              "init dependence " + fmt(std::abs(from_tsls - from_ols)));

  // Quantile decreasing in n for valid instruments.
  DgpSpec valid;
  valid.gamma = 1.0;
  valid.sigma = 0.5;
  double prev = 1e300;
  for (int n : {500, 2000, 8000}) {
    double avg = 0.0;
    const int reps = 30;
    for (int r = 0; r < reps; ++r) {
      DgpSpec s = valid;
      s.n = n;
      s.seed = derive_seed(53, {(std::uint64_t)n, (std::uint64_t)r});
      const IVDataset d = generate_dgp(s);
      const ProjectedDesign des = project_onto_instruments(d);
      BootstrapSettings b;
      b.seed = derive_seed(54, {(std::uint64_t)n, (std::uint64_t)r});
      b.n_boot = 200;
      avg += score_quantile_bootstrap(des, d, fit_tsls(des, d).beta, b);
    }
    avg /= reps;
    out.require(avg < prev, "quantile not decreasing at n " + fmt(n));
    prev = avg;
  }

  // Quantile strictly increasing in the confounder-instrument correlation.
  double prev_q = -1.0;
  std::string detail;
  for (double beta_uz : {0.0, 0.4, 0.8}) {
    double avg = 0.0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
      DgpSpec s = valid;
      s.n = 1000;
      s.beta_uz = beta_uz;
      s.seed = derive_seed(55, {(std::uint64_t)(beta_uz * 10), (std::uint64_t)r});
      const IVDataset d = generate_dgp(s);
      const ProjectedDesign des = project_onto_instruments(d);
      BootstrapSettings b;
      b.seed = derive_seed(56, {(std::uint64_t)(beta_uz * 10), (std::uint64_t)r});
      b.n_boot = 200;
      avg += score_quantile_bootstrap(des, d, fit_tsls(des, d).beta, b);
    }
    avg /= reps;
    out.require(avg > prev_q,
                "quantile not increasing at beta_uz " + fmt(beta_uz));
    prev_q = avg;
    detail += "q(" + fmt(beta_uz) + ") " + fmt(avg) + " ";
  }
  out.detail = "init diff " + fmt(std::abs(from_tsls - from_ols)) + "; " + detail;
  return out;
}

// --- 8. Solver correctness properties ---
Outcome solver_properties() {
  Outcome out;
  std::mt19937_64 rng = make_engine(61);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Gradient vs central differences on 50 random points.
  double worst_grad = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + trial % 3;
    const IVDataset data = [&] {
      IVDataset d;
      const int n = 40;
      d.y.resize(n);
      d.x.resize(n, p);
      d.z.resize(n, p + 1);
      for (int i = 0; i < n; ++i) {
        d.y(i) = normal(rng);
        for (int j = 0; j < p; ++j) d.x(i, j) = normal(rng);
        for (int j = 0; j < p + 1; ++j) d.z(i, j) = normal(rng);
      }
      return d;
    }();
    const ProjectedDesign design = project_onto_instruments(data);
    SqrtQuadratic quad;
    const double n = static_cast<double>(data.n());
    quad.a = design.x_proj.transpose() * design.x_proj / n;
    quad.b = design.x_proj.transpose() * design.y_proj / n;
    quad.c = design.y_proj.squaredNorm() / n;
    const double rho = 0.05 + unif(rng);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd x(p);
    for (int j = 0; j < p; ++j) x(j) = 2.0 * normal(rng);
    const double eps = 1e-4;
    const Eigen::VectorXd g =
        sqrt_quadratic_gradient(quad, rho, 2.0, zero, x, eps);
    for (int j = 0; j < p; ++j) {
      const double h = 1e-6;
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const double fd = (sqrt_quadratic_value(quad, rho, 2.0, zero, xp, eps) -
                         sqrt_quadratic_value(quad, rho, 2.0, zero, xm, eps)) /
                        (2.0 * h);
      worst_grad =
          std::max(worst_grad, std::abs(fd - g(j)) / (1.0 + std::abs(g(j))));
    }
  }
  out.require(worst_grad <= 1e-6, "gradient check " + fmt(worst_grad));

  // Convexity on 1000 random triples.
  const IVDataset data = [&] {
    IVDataset d;
    const int n = 60;
    d.y.resize(n);
    d.x.resize(n, 2);
    d.z.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      d.y(i) = normal(rng);
      for (int j = 0; j < 2; ++j) d.x(i, j) = normal(rng);
      for (int j = 0; j < 3; ++j) d.z(i, j) = normal(rng);
    }
    return d;
  }();
  const ProjectedDesign design = project_onto_instruments(data);
  DriveSpec dspec;
  dspec.rho = 0.3;
  double worst_convexity = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd a(2), b(2);
    a << 3 * normal(rng), 3 * normal(rng);
    b << 3 * normal(rng), 3 * normal(rng);
    const double t = unif(rng);
    const double lhs =
        drive_objective(t * a + (1 - t) * b, design, dspec);
    const double rhs = t * drive_objective(a, design, dspec) +
                       (1 - t) * drive_objective(b, design, dspec);
    worst_convexity = std::max(worst_convexity, lhs - rhs);
  }
  out.require(worst_convexity <= 1e-12,
              "convexity violation " + fmt(worst_convexity));

  // rho = 0 fits match the classical estimator.
  double worst_rho0 = 0.0;
  for (int r = 0; r < 10; ++r) {
    DgpSpec s;
    s.gamma = 1.0;
    s.sigma = 0.5;
    s.n = 500;
    s.seed = 62 + r;
    const IVDataset d = generate_dgp(s);
    const ProjectedDesign des = project_onto_instruments(d);
    DriveSpec zero_spec;
    zero_spec.rho = 0.0;
    worst_rho0 = std::max(
        worst_rho0,
        (fit_drive(des, zero_spec).beta - fit_tsls(des, d).beta).norm());
  }
  out.require(worst_rho0 <= 1e-8, "rho=0 mismatch " + fmt(worst_rho0));

  // k-class endpoints.
  double worst_kclass = 0.0;
  for (int r = 0; r < 10; ++r) {
    DgpSpec s;
    s.gamma = 1.0;
    s.sigma = 0.5;
    s.n = 400;
    s.seed = 63 + r;
    const IVDataset d = generate_dgp(s);
    const ProjectedDesign des = project_onto_instruments(d);
    worst_kclass = std::max(
        worst_kclass,
        (fit_kclass(des, d, {0.0}).beta - fit_ols(d).beta).norm());
    worst_kclass = std::max(
        worst_kclass,
        (fit_kclass(des, d, {1.0}).beta - fit_tsls(des, d).beta).norm());
  }
  out.require(worst_kclass <= 1e-10, "k-class endpoints " + fmt(worst_kclass));
  out.detail = "grad " + fmt(worst_grad) + ", convexity " +
               fmt(worst_convexity) + ", rho0 " + fmt(worst_rho0) +
               ", k-class " + fmt(worst_kclass);
  return out;
}

// --- 9. GMM identity and the q-Wasserstein variant ---
Outcome gmm_and_q_variant() {
  Outcome out;
  std::mt19937_64 rng = make_engine(64);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Over-identified valid-instrument data with one endogenous regressor.
  auto overid = [&](int n, int d, std::uint64_t seed) {
    std::mt19937_64 local = make_engine(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    IVDataset data;
    data.y.resize(n);
    data.x.resize(n, 1);
    data.z.resize(n, d);
    for (int i = 0; i < n; ++i) {
      double fs = 0.0;
      for (int j = 0; j < d; ++j) {
        data.z(i, j) = n01(local);
        fs += data.z(i, j) / std::sqrt(static_cast<double>(d));
      }
      const double u = 0.5 * n01(local);
      data.x(i, 0) = fs + u;
      data.y(i) = data.x(i, 0) + u;
    }
    return data;
  };

  double worst_identity = 0.0;
  for (int r = 0; r < 5; ++r) {
    const IVDataset data = overid(1000, 2 + r % 2, 65 + r);
    const ProjectedDesign design = project_onto_instruments(data);
    DriveSpec spec;
    spec.rho = 0.1 + 0.2 * r;
    worst_identity = std::max(
        worst_identity,
        (fit_drive(design, spec).beta -
         fit_sqrt_ridge_gmm(iv_moment_system(data), spec).beta)
            .norm());
  }
  out.require(worst_identity <= 1e-8, "gmm identity " + fmt(worst_identity));

  double worst_q = 0.0;
  const IVDataset data = overid(8000, 2, 66);
  const ProjectedDesign design = project_onto_instruments(data);
  const double bound = rho_eigenvalue_rule(design, 1.0);
  for (double q : {1.25, 1.5}) {
    DriveSpec spec;
    spec.rho = bound;
    spec.q_order = q;
    worst_q =
        std::max(worst_q, std::abs(fit_drive(design, spec).beta(0) - 1.0));
  }
  out.require(worst_q <= 0.02, "q-variant error " + fmt(worst_q));
  out.detail =
      "gmm identity " + fmt(worst_identity) + ", q error " + fmt(worst_q);
  return out;
}

// --- 10. Root-n rate of the analytically-penalized square-root ridge ---
Outcome sqrt_ridge_rate() {
  Outcome out;
  const int p = 2;
  const double alpha = 0.05;
  const double c_mult = 1.1;
  const double sigma = 1.0;
  Eigen::VectorXd beta0(p);
  beta0 << 1.0, -0.5;
  std::vector<double> constants;
  std::string detail;
  for (int n : {400, 1600, 6400}) {
    const double lambda =
        std::sqrt(static_cast<double>(p)) *
        lambda_star_analytic(n, p, alpha, c_mult);
    const double rho = (lambda / n) * (lambda / n);
    std::vector<double> errs;
    for (int r = 0; r < 100; ++r) {
      std::mt19937_64 local =
          make_engine(derive_seed(67, {(std::uint64_t)n, (std::uint64_t)r}));
      std::normal_distribution<double> n01(0.0, 1.0);
      IVDataset data;
      data.y.resize(n);
      data.x.resize(n, p);
      data.z.resize(n, p);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
          data.x(i, j) = n01(local);
          data.z(i, j) = data.x(i, j);
        }
        data.y(i) = data.x.row(i).dot(beta0) + sigma * n01(local);
      }
      const Estimate est = fit_sqrt_ridge_ols(data, {rho});
      errs.push_back((est.beta - beta0).norm());
    }
    const double med = median(errs);
    const double bound =
        sigma * std::sqrt(p * std::log(2.0 * p / alpha) / n);
    constants.push_back(med / bound);
    detail += "n" + std::to_string(n) + " C " + fmt(med / bound) + " ";
  }
  const double cmin = *std::min_element(constants.begin(), constants.end());
  const double cmax = *std::max_element(constants.begin(), constants.end());
  out.require(cmax <= 1.0, "rate constant exceeds the bound: " + fmt(cmax));
  out.require(cmax / cmin <= 2.0,
              "rate constant unstable: " + fmt(cmax / cmin));
  out.detail = detail + "(spread " + fmt(cmax / cmin) + ")";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"duality-equivalence", duality_equivalence},
      {"conditional-shift-formulas", shift_formulas},
      {"delayed-shrinkage", delayed_shrinkage},
      {"nonvanishing-rho-consistency", nonvanishing_rho_consistency},
      {"mse-grid-ordering", mse_grid_ordering},
      {"asymptotic-coincidence", asymptotic_coincidence},
      {"bootstrap-rho-behavior", bootstrap_rho_behavior},
      {"solver-properties", solver_properties},
      {"gmm-and-q-variant", gmm_and_q_variant},
      {"sqrt-ridge-rate", sqrt_ridge_rate},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] %-30s (%.1fs) %s\n", outcome.pass ? "PASS" : "FAIL",
                criterion.name, seconds, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
