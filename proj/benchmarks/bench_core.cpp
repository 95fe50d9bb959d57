#include <benchmark/benchmark.h>

#include <semiflow/blaschke.hpp>
#include <semiflow/cocycle.hpp>
#include <semiflow/continuity.hpp>
#include <semiflow/flow.hpp>
#include <semiflow/norms.hpp>

#include <cmath>

using namespace semiflow;

namespace {

AnalyticFn radial_G() { return AnalyticFn::polynomial({0.0, -1.0}); }

void BM_AdvanceOde(benchmark::State& state) {
    const auto flow = FlowModel::ode(AnalyticFn::polynomial({0.0, -1.0, 1.0}));
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(advance(flow, {0.3, 0.4}, t));
}
BENCHMARK(BM_AdvanceOde)->Arg(1)->Arg(5)->Arg(20);

void BM_AdvanceWithDerivative(benchmark::State& state) {
    const auto flow = FlowModel::ode(radial_G());
    for (auto _ : state) benchmark::DoNotOptimize(advance_with_derivative(flow, {0.3, 0.4}, 2.0));
}
BENCHMARK(BM_AdvanceWithDerivative);

void BM_CocycleQuadrature(benchmark::State& state) {
    const WeightedSemigroup wsg{FlowModel::ode(radial_G()), WeightSpec::weight(AnalyticFn::identity())};
    for (auto _ : state) benchmark::DoNotOptimize(cocycle_eval(wsg, {0.3, 0.4}, 2.0));
}
BENCHMARK(BM_CocycleQuadrature);

void BM_Taylor(benchmark::State& state) {
    const auto f = AnalyticFn::exp(AnalyticFn::identity());
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(taylor(f, N, 0.9));
}
BENCHMARK(BM_Taylor)->Arg(16)->Arg(64)->Arg(256);

void BM_BlaschkeDerivative(benchmark::State& state) {
    const auto B = dyadic_radial_product(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(blaschke_derivative(B, {0.9, 0.1}));
}
BENCHMARK(BM_BlaschkeDerivative)->Arg(10)->Arg(40);

void BM_GpvCheck(benchmark::State& state) {
    const auto B = dyadic_radial_product(12);
    std::vector<std::size_t> marked(12);
    for (std::size_t i = 0; i < marked.size(); ++i) marked[i] = i;
    for (auto _ : state) benchmark::DoNotOptimize(gpv_bound_check(B, marked, 0.1));
}
BENCHMARK(BM_GpvCheck);

void BM_Case1Construction(benchmark::State& state) {
    const auto flow = FlowModel::ode(radial_G());
    for (auto _ : state) benchmark::DoNotOptimize(construct_case1(flow, 1.0, 6, 0.5));
}
BENCHMARK(BM_Case1Construction)->Unit(benchmark::kMillisecond);

void BM_BlochGap(benchmark::State& state) {
    const auto gc = construct_case1(FlowModel::ode(radial_G()), 1.0, 6, 0.5);
    std::vector<double> radii{0.0};
    for (int j = 1; j <= 10; ++j) radii.push_back(1.0 - std::ldexp(1.0, -j));
    const auto grid = GridSpec::polar(radii, 64);
    const auto w = WeightSpec::coboundary(AnalyticFn::polynomial({1.0, -1.0}));
    for (auto _ : state) benchmark::DoNotOptimize(bloch_gap(gc, w, grid));
}
BENCHMARK(BM_BlochGap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
