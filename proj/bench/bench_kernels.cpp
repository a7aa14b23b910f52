// Serial reference versus OpenMP for the sweep kernels. Arg 0 = serial,
// arg 1 = openmp.

#include "ep3/commands.hpp"
#include "ep3/spectroscopy.hpp"
#include "ep3/validate.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ep3;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::openmp; }

void BM_AbsorptionCurve(benchmark::State& state) {
  const double gamma = kTwoPi * 0.040;
  const SystemParams p = SystemParams::symmetric(gamma, gamma);
  AuxParams a;
  a.omega_a = spectro_defaults::kOmegaA;
  a.gamma_a = spectro_defaults::kGammaA;
  const auto grid = detuning_grid(401);
  for (auto _ : state) benchmark::DoNotOptimize(na_tgt_curve(p, a, 200.0, grid, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_AbsorptionCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SyntheticLine(benchmark::State& state) {
  const double gamma = kTwoPi * 0.040;
  AuxParams a;
  a.omega_a = spectro_defaults::kOmegaA;
  a.gamma_a = spectro_defaults::kGammaA;
  const auto grid = detuning_grid(401);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        synth_line(SystemParams::symmetric(0.8 * gamma, gamma), a, 200.0, grid, 200, 5, 1, false, exec_of(state)));
  }
}
BENCHMARK(BM_SyntheticLine)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Validation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_validation(2024, exec_of(state)));
}
BENCHMARK(BM_Validation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TomographyCommand(benchmark::State& state) {
  ParamConfig cfg;
  cfg.set("exec", state.range(0) == 0 ? "serial" : "openmp");
  for (auto _ : state) benchmark::DoNotOptimize(run_command("tomography", cfg));
}
BENCHMARK(BM_TomographyCommand)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
