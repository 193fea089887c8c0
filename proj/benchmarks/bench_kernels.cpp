#include <benchmark/benchmark.h>

#include <random>

#include "mfg/grid.hpp"
#include "mfg/perspective.hpp"
#include "mfg/solver.hpp"
#include "mfg/spectral.hpp"

using namespace mfg;

namespace {

std::vector<Vec> sample_points(int n, double scale) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coord(-scale, scale);
    std::vector<Vec> pts(static_cast<size_t>(n));
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    return pts;
}

const CongestionParams kMixed(2.0, 3.0, 1e-3);
const CongestionParams kLow(1.5, 3.0, 0.1);

void BM_Hamiltonian(benchmark::State& state) {
    const CongestionParams& p = state.range(0) == 0 ? kMixed : kLow;
    const auto pts = sample_points(1024, 4.0);
    for (auto _ : state) {
        double acc = 0.0;
        for (const Vec& z : pts) acc += hamiltonian(z, p);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Hamiltonian)->Arg(0)->Arg(1);

void BM_ProxEll(benchmark::State& state) {
    const CongestionParams& p = state.range(0) == 0 ? kMixed : kLow;
    const auto pts = sample_points(1024, 3.0);
    for (auto _ : state) {
        double acc = 0.0;
        for (const Vec& z : pts) {
            auto [a, b] = prox_ell(z[0], {z[1], 0.3}, 1.0, p);
            acc += a + b[0];
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_ProxEll)->Arg(0)->Arg(1);

void BM_NeumannPoissonCG(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = Grid::make_2d(2.0, 2.0, n, n);
    CellField rhs = make_cell_field(g);
    for (int i = 0; i < g.total_cells(); ++i)
        rhs[i] = std::cos(M_PI * g.cell_center(i)[0] / 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(neumann_poisson(g, rhs, 0.0));
}
BENCHMARK(BM_NeumannPoissonCG)->Arg(32)->Arg(64);

void BM_SpectralPoisson(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = Grid::make_2d(2.0, 2.0, n, n);
    const SpectralPoisson sp(g);
    CellField rhs = make_cell_field(g);
    for (int i = 0; i < g.total_cells(); ++i)
        rhs[i] = std::cos(M_PI * g.cell_center(i)[0] / 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(sp.poisson(rhs));
}
BENCHMARK(BM_SpectralPoisson)->Arg(32)->Arg(64)->Arg(128);

void BM_AffineProjection(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = Grid::make_2d(2.0, 2.0, n, n);
    const AffineProjector proj(g, 1e-10);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-0.2, 0.2);
    CellField v1a = make_cell_field(g, 0.25), v2 = make_cell_field(g, 0.25);
    CellVecField v1b = make_cell_vec_field(g);
    for (double& x : v1a) x += unit(rng);
    for (double& x : v2) x += unit(rng);
    for (int k = 0; k < 2; ++k)
        for (double& x : v1b.comp[k]) x = unit(rng);
    CellField phi = make_cell_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(proj.project(v1a, v1b, v2, phi));
}
BENCHMARK(BM_AffineProjection)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
