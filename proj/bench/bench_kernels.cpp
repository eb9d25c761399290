#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "hardyspec/evolution.hpp"
#include "hardyspec/forms.hpp"

using namespace hardyspec;

namespace {

std::shared_ptr<const SpectrumTable> table_for(int n_max) {
  static std::map<int, std::shared_ptr<const SpectrumTable>> cache;
  auto& t = cache[n_max];
  if (!t) {
    const auto p = ModelParams::make(3, 0.5, 0.0);
    const std::vector<SectorRequest> req{{0, 3}, {1, 3}, {2, 2}};
    auto ang = std::make_shared<AngularSpectrum>(solve_angular_spectrum(p, req, 200, 3));
    t = std::make_shared<const SpectrumTable>(build_spectrum(ang, n_max, 8));
  }
  return t;
}

void BM_forms(benchmark::State& state, Execution exec) {
  const auto table = table_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_forms(*table, 64, exec));
  state.counters["basis"] = static_cast<double>(table->size());
}

void BM_coupling(benchmark::State& state, Execution exec) {
  const auto table = table_for(static_cast<int>(state.range(0)));
  PerturbationSpec h;
  h.amplitude_A = 0.1;
  h.amplitude_B = 0.2;
  const CouplingOperator op(*table, h);
  for (auto _ : state) benchmark::DoNotOptimize(op(0.01, exec));
  state.counters["basis"] = static_cast<double>(table->size());
}

}  // namespace

BENCHMARK_CAPTURE(BM_forms, serial, Execution::Serial)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_forms, parallel, Execution::Parallel)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_coupling, serial, Execution::Serial)->Arg(6)->Arg(12)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_coupling, parallel, Execution::Parallel)->Arg(6)->Arg(12)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
