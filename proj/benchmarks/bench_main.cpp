/*
   Copyright 2026 The pbgfluor Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "pbgfluor/inversion.hpp"
#include "pbgfluor/montecarlo.hpp"
#include "pbgfluor/renewal.hpp"
#include "pbgfluor/steadystate.hpp"

namespace {

using namespace pbgfluor;

SystemParams trapping_params() {
    SystemParams p;
    p.pbg_coupling = 0.19245008972987526;
    return p;
}

void BM_ContourInversion(benchmark::State& state) {
    const auto p = trapping_params();
    inversion::ContourSpec spec;
    spec.grid_points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(inversion::nojump_populations(p, resolvent::band_edge_of(p), spec, 30.0, 0.01));
}
BENCHMARK(BM_ContourInversion)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_Renewal(benchmark::State& state) {
    const auto p = trapping_params();
    const auto s = inversion::nojump_populations(p, resolvent::band_edge_of(p), {}, 30.0, 30.0 / state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(renewal::solve_renewal(s, p.gamma));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Renewal)->Arg(1000)->Arg(3000)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

void BM_RenewalTransform(benchmark::State& state) {
    const auto p = trapping_params();
    const auto s = inversion::nojump_populations(p, resolvent::band_edge_of(p), {}, 30.0, 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(renewal::renewal_transform_check(s, p.gamma));
}
BENCHMARK(BM_RenewalTransform)->Unit(benchmark::kMillisecond);

void BM_ModeIntegral(benchmark::State& state) {
    const auto p = trapping_params();
    for (auto _ : state) benchmark::DoNotOptimize(steadystate::p_infinity_mode_integral(p));
}
BENCHMARK(BM_ModeIntegral)->Unit(benchmark::kMicrosecond);

void BM_Ensemble(benchmark::State& state) {
    const auto p = trapping_params();
    const auto s = inversion::nojump_populations(p, resolvent::band_edge_of(p), {}, 30.0, 0.01);
    for (auto _ : state)
        benchmark::DoNotOptimize(montecarlo::ensemble_average(static_cast<std::size_t>(state.range(0)), 1, s, 30.0));
}
BENCHMARK(BM_Ensemble)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
