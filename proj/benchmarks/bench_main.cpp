#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "zitter/dynamics.hpp"
#include "zitter/oracle.hpp"
#include "zitter/packet.hpp"
#include "zitter/special.hpp"

using namespace zitter;

namespace {

GaussianPacket fig1_packet(Model model) {
    GaussianPacket p;
    p.model = model;
    p.d_x = 1.5;
    p.d_y = 1.2;
    p.d_z = 1.8;
    p.k0x = 0.998;
    return p;
}

std::vector<double> grid(double end, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[std::size_t(i)] = end * i / (n - 1);
    return t;
}

}  // namespace

static void BM_PsiLevels(benchmark::State& state) {
    std::vector<double> out(static_cast<std::size_t>(state.range(0)) + 1);
    for (auto _ : state) {
        psi_levels(3.7, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_PsiLevels)->Arg(50)->Arg(400);

static void BM_GaussHermite(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(int(state.range(0))));
}
BENCHMARK(BM_GaussHermite)->Arg(64)->Arg(256);

static void BM_CoefficientMatrix(benchmark::State& state) {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto p = fig1_packet(Model::planar);
    CoefficientOptions o;
    o.n_max = int(state.range(0));
    o.auto_truncate = false;
    o.tail_tolerance = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(coefficient_matrix(p, f, o));
}
BENCHMARK(BM_CoefficientMatrix)->Arg(60)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Trajectory2p1(benchmark::State& state) {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto p = fig1_packet(Model::planar);
    const auto u = coefficient_matrix(p, f);
    const auto t = grid(200.0, 401);
    for (auto _ : state) benchmark::DoNotOptimize(trajectory_2p1(p, u, f, t));
}
BENCHMARK(BM_Trajectory2p1)->Unit(benchmark::kMillisecond);

static void BM_Trajectory3p1(benchmark::State& state) {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto p = fig1_packet(Model::spatial);
    const auto u = coefficient_matrix(p, f);
    const auto t = grid(200.0, 401);
    for (auto _ : state) benchmark::DoNotOptimize(trajectory_3p1(p, u, f, t));
}
BENCHMARK(BM_Trajectory3p1)->Unit(benchmark::kMillisecond);

static void BM_DenseSpectrum(benchmark::State& state) {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto h = DenseHamiltonian::build(int(state.range(0)), f);
    for (auto _ : state) benchmark::DoNotOptimize(dense_spectrum(h));
}
BENCHMARK(BM_DenseSpectrum)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
