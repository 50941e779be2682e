#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fvproj/analysis.hpp"
#include "fvproj/linalg.hpp"
#include "fvproj/operators.hpp"
#include "fvproj/problems.hpp"
#include "fvproj/scheme.hpp"

namespace {

using namespace fvproj;

const Mesh& mesh_at(int level) {
  static std::vector<Mesh> cache;
  while (static_cast<int>(cache.size()) <= level) cache.push_back(acute_square_mesh(static_cast<int>(cache.size())));
  return cache[static_cast<std::size_t>(level)];
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

void BM_AssembleOperators(benchmark::State& state) {
  const Mesh& m = mesh_at(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    OperatorSet ops(m);
    benchmark::DoNotOptimize(ops.A.nnz());
  }
  state.counters["triangles"] = static_cast<double>(m.num_triangles());
}
BENCHMARK(BM_AssembleOperators)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_ConvectionMatrix(benchmark::State& state) {
  const Mesh& m = mesh_at(static_cast<int>(state.range(0)));
  const OperatorSet ops(m);
  const P0CapRT0 u = random_solenoidal(ops, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(convection_matrix(u).nnz());
  }
}
BENCHMARK(BM_ConvectionMatrix)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_PressureSolve(benchmark::State& state) {
  const Mesh& m = mesh_at(static_cast<int>(state.range(0)));
  const OperatorSet ops(m);
  std::vector<double> mu = random_vector(2 * m.num_triangles(), 2);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] *= ops.mass_v[i];
  const std::vector<double> rhs = ops.G.apply_transpose(mu);
  SolverConfig cfg;
  cfg.method = SolverMethod::cg;
  cfg.rtol = 1e-10;
  for (auto _ : state) {
    const SolveResult res = solve(ops.A, rhs, cfg, ops.mass_p1nc);
    benchmark::DoNotOptimize(res.x.data());
    state.counters["iterations"] = static_cast<double>(res.iterations);
  }
}
BENCHMARK(BM_PressureSolve)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_MomentumSolve(benchmark::State& state) {
  const Mesh& m = mesh_at(static_cast<int>(state.range(0)));
  RunConfig cfg;
  ProjectionScheme scheme(m, cfg, make_problem("manufactured-A", cfg.reynolds));
  const SchemeState s = scheme.initialize();
  for (auto _ : state) {
    benchmark::DoNotOptimize(scheme.momentum_step(s).values().data());
  }
}
BENCHMARK(BM_MomentumSolve)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_SchemeStep(benchmark::State& state) {
  const Mesh& m = mesh_at(static_cast<int>(state.range(0)));
  RunConfig cfg;
  ProjectionScheme scheme(m, cfg, make_problem("manufactured-A", cfg.reynolds));
  SchemeState s = scheme.initialize();
  for (auto _ : state) {
    benchmark::DoNotOptimize(scheme.advance(s).energy);
  }
}
BENCHMARK(BM_SchemeStep)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
