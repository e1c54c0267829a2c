#include <benchmark/benchmark.h>

#include "isolab/constructions.hpp"
#include "isolab/measures.hpp"
#include "isolab/profile.hpp"
#include "isolab/shapes.hpp"

using namespace isolab;

namespace {

Point at(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}

void BM_WeightedVolumePolar(benchmark::State& state) {
    const Shape E = polar_shape(at(1.5, 0.5), {1.0, 0.1, -0.05, 0.04});
    const auto f = exp_approach_above(2.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(weighted_volume(E, f).value);
}
BENCHMARK(BM_WeightedVolumePolar);

void BM_WeightedPerimeterAnisotropic(benchmark::State& state) {
    const Shape E = polar_shape(at(1.5, 0.5), {1.0, 0.1, -0.05, 0.04});
    const auto h = fourier_anisotropy(exp_approach_below(0.5, 1.0), {0.2}, {0.1});
    for (auto _ : state) benchmark::DoNotOptimize(weighted_perimeter(E, h).value);
}
BENCHMARK(BM_WeightedPerimeterAnisotropic);

void BM_BallVolume3d(benchmark::State& state) {
    Point c = Point::Zero(3);
    c(0) = 4;
    const Shape B = make_ball(c, 1.0);
    const auto f = exp_approach_below(0.5, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(weighted_volume(B, f).value);
}
BENCHMARK(BM_BallVolume3d)->Unit(benchmark::kMillisecond);

void BM_SweepVolume(benchmark::State& state) {
    const auto f = exp_approach_below(1.0, 1.0);
    Point theta = Point::Zero(2);
    theta(0) = 1;
    Point nu = Point::Zero(2);
    nu(1) = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sweep_volume(f, 8.0, theta, nu, 1e-2));
}
BENCHMARK(BM_SweepVolume);

void BM_BuildBelow(benchmark::State& state) {
    const auto f = exp_approach_below(1.0, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_small_density_set_below(f, isotropic(f), 2, 2.0, SearchConfig{}).success);
}
BENCHMARK(BM_BuildBelow)->Unit(benchmark::kMillisecond);

void BM_FarBallScan(benchmark::State& state) {
    const auto [f, h] = counterexample_densities(10.0);
    for (auto _ : state) benchmark::DoNotOptimize(far_ball_scan(f, h, kPi, {1.5, 2, 3, 5, 10, 20}).size());
}
BENCHMARK(BM_FarBallScan)->Unit(benchmark::kMillisecond);

void BM_EstimateProfile(benchmark::State& state) {
    const auto one = constant_density(1.0);
    OptimizerConfig cfg;
    cfg.modes = 2;
    cfg.max_iterations = 20;
    cfg.centre_distances = {0.0};
    for (auto _ : state) benchmark::DoNotOptimize(estimate_profile(one, isotropic(one), kPi, cfg).J_estimate);
}
BENCHMARK(BM_EstimateProfile)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
