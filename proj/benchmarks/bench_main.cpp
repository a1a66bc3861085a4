#include <benchmark/benchmark.h>

#include "driveiv/drive.hpp"
#include "driveiv/projection.hpp"
#include "driveiv/rho_selection.hpp"
#include "driveiv/simulation.hpp"
#include "driveiv/wasserstein.hpp"

namespace {

using namespace driveiv;

IVDataset bench_data(int n) {
  DgpSpec spec;
  spec.n = n;
  spec.seed = 7;
  return generate_dgp(spec);
}

void BM_ProjectOntoInstruments(benchmark::State& state) {
  const IVDataset data = bench_data(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(project_onto_instruments(data));
}
BENCHMARK(BM_ProjectOntoInstruments)->Arg(500)->Arg(2000)->Arg(8000);

void BM_FitDrive(benchmark::State& state) {
  const IVDataset data = bench_data(static_cast<int>(state.range(0)));
  const ProjectedDesign design = project_onto_instruments(data);
  DriveSpec spec;
  spec.rho = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(fit_drive(design, spec));
}
BENCHMARK(BM_FitDrive)->Arg(500)->Arg(2000)->Arg(8000);

void BM_ScoreQuantileBootstrap(benchmark::State& state) {
  const IVDataset data = bench_data(2000);
  const ProjectedDesign design = project_onto_instruments(data);
  const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, 0.9);
  BootstrapSettings settings;
  settings.n_boot = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(score_quantile_bootstrap(design, beta, settings));
}
BENCHMARK(BM_ScoreQuantileBootstrap)->Arg(100)->Arg(500);

void BM_GaussianW2(benchmark::State& state) {
  GaussianLaw a, b;
  a.mean = Eigen::Vector2d(0.0, 0.0);
  b.mean = Eigen::Vector2d(1.0, -1.0);
  a.cov = (Eigen::Matrix2d() << 2.0, 0.5, 0.5, 1.0).finished();
  b.cov = (Eigen::Matrix2d() << 1.0, -0.2, -0.2, 3.0).finished();
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_w2(a, b));
}
BENCHMARK(BM_GaussianW2);

}  // namespace

BENCHMARK_MAIN();
