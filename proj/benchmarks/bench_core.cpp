#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "stefan/rng.hpp"
#include "stefan/simplex.hpp"
#include "stefan/solver.hpp"

namespace {

using namespace stefan;

void BM_BottDuffin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Xorshift64Star rng(1);
  const Composition c = make_composition(sample_simplex(rng, n));
  const FrictionMatrix a = build_friction_matrix(c, DiffusionTable::uniform(n, 1.5));
  for (auto _ : state) benchmark::DoNotOptimize(bott_duffin(a).matrix);
}
BENCHMARK(BM_BottDuffin)->Arg(2)->Arg(3)->Arg(6)->Arg(16);

void BM_SymmetricEigen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Xorshift64Star rng(2);
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
  const Matrix a = symmetric_part(g);
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigen(a).values);
}
BENCHMARK(BM_SymmetricEigen)->Arg(3)->Arg(6)->Arg(16);

void BM_SolverStep(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 3;
  thermo::ModelParams p;
  p.n = n;
  p.d = DiffusionTable::from_upper(n, Vector{0.5, 1.0, 2.0});
  const pde::SolverConfig cfg{thermo::ModelSpec(thermo::ModelKind::ClassicMs, p)};
  const pde::Field f = pde::init_field(pde::Grid1D::make(cells, 1.0), n, [](double x) {
    const double a = 0.1 * std::cos(std::numbers::pi * x);
    return Vector{0.3 + a, 0.3 - a, 0.4};
  });
  const double dt = 0.1 / static_cast<double>(cells * cells);
  for (auto _ : state) benchmark::DoNotOptimize(pde::step(f, cfg, dt).report);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cells));
}
BENCHMARK(BM_SolverStep)->Arg(50)->Arg(200);

}  // namespace
BENCHMARK_MAIN();
