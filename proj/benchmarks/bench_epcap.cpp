// Micro benchmarks for the hot paths on the 500-device case-study fleet.
#include <benchmark/benchmark.h>

#include <vector>

#include "epcap/epcap.hpp"

namespace {

using namespace epcap;

struct Fixture {
  Fleet fleet = generate_case_study(1);
  std::vector<double> x = time_to_go(fleet);
  std::vector<double> xs;
  RequestProfile shape = trapezoid(2.0, 1.0);
  EpCurve shape_curve = ep_transform(shape);
  std::vector<ConstantStep> steps = discretize(shape, kDefaultPeriod);

  Fixture() {
    const auto ens = draw_ensemble(AvailabilityModel::uniform(fleet.size(), 0.6), 1, 42);
    xs = apply_availability(x, ens.draws[0]);
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

void BM_CapacityCurve(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(capacity_curve(f.fleet.p_max(), f.xs));
}
BENCHMARK(BM_CapacityCurve);

void BM_DominanceCheck(benchmark::State& state) {
  const auto& f = fx();
  const auto cap = capacity_curve(f.fleet.p_max(), f.xs);
  const auto req = ep_transform(scale(f.shape, 1500.0));
  for (auto _ : state) benchmark::DoNotOptimize(dominated_by(req, cap));
}
BENCHMARK(BM_DominanceCheck);

void BM_PolicySimulation(benchmark::State& state) {
  const auto& f = fx();
  const PolicySimulator sim(f.fleet.p_max(), f.xs);
  for (auto _ : state) benchmark::DoNotOptimize(sim.feasible(f.steps, 1500.0));
}
BENCHMARK(BM_PolicySimulation);

void BM_MagnitudeEp(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(max_magnitude_ep(f.shape, f.fleet.p_max(), f.xs));
}
BENCHMARK(BM_MagnitudeEp);

void BM_MagnitudeSimulated(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        max_magnitude_simulated(f.shape, f.fleet.p_max(), f.xs, kDefaultPeriod));
}
BENCHMARK(BM_MagnitudeSimulated);

}  // namespace

BENCHMARK_MAIN();
