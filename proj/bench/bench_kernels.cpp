// Serial reference vs OpenMP kernels on the reference workloads.
#include <benchmark/benchmark.h>

#include "kickjt/bifurcation.hpp"
#include "kickjt/observables.hpp"
#include "kickjt/quantum_floquet.hpp"

using namespace kickjt;

namespace {

ValidatedConfig config(double lambda, int truncation = 18) {
  NumericsConfig n;
  n.truncation = truncation;
  return validate_params({reference_omega(), reference_delta(), lambda}, n);
}

Exec mode(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_HusimiPlane(benchmark::State& state) {
  const FockBasis basis(18);
  const auto cfg = config(0.32);
  const auto spec = diagonalize_block(floquet_sector_block(cfg, basis, Parity::O), basis.sector(Parity::O),
                                      static_cast<Eigen::Index>(basis.size()), 1e-9);
  const auto& psi = spec.eigenvectors.front();
  const auto plane = symmetry_plane(reference_omega());
  const auto us = uniform_grid(-4.0, 4.0, 81);
  for (auto _ : state) benchmark::DoNotOptimize(husimi_plane(psi, basis, plane, us, us, mode(state)));
  label(state);
}

void BM_Portrait(benchmark::State& state) {
  const auto cfg = config(0.32);
  PortraitGrid grid;
  grid.p_slope = -std::tan(reference_omega() / 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(portrait(cfg, grid, 400, mode(state)));
  label(state);
}

void BM_FixedPoints(benchmark::State& state) {
  const auto cfg = config(0.5);
  const auto seeds = default_seeds(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(find_fixed_points(cfg, seeds, mode(state)));
  label(state);
}

void BM_Entanglement(benchmark::State& state) {
  const FockBasis basis(18);
  std::vector<QuantumState> states;
  for (double l : {0.1, 0.2, 0.3, 0.4}) {
    const auto cfg = config(l);
    auto spec = diagonalize_block(floquet_sector_block(cfg, basis, Parity::O), basis.sector(Parity::O),
                                  static_cast<Eigen::Index>(basis.size()), 1e-9);
    states.push_back(spec.eigenvectors.front());
  }
  for (auto _ : state) benchmark::DoNotOptimize(entanglement_measures(states, basis, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_HusimiPlane)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Portrait)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FixedPoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Entanglement)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
