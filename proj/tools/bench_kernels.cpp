// Serial reference vs OpenMP path for the node-parallel kernels. The
// second benchmark argument selects the policy: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include <vector>

#include "dhflow/dirac/operator.hpp"
#include "dhflow/flow/terms.hpp"
#include "dhflow/geometry/generators.hpp"
#include "dhflow/kernels.hpp"

namespace {

using namespace dhflow;

struct Fixture {
  explicit Fixture(int n)
      : N(geometry::TargetManifold::sphere(2)),
        d(geometry::TorusDomain::square(n)),
        u(make_map(d, N)),
        psi(make_spinor(u, N)) {}

  static geometry::MapField make_map(const geometry::TorusDomain& d,
                                     const geometry::TargetManifold& N) {
    geometry::Rng rng(1);
    return geometry::perturbed_map(geometry::constant_map(d, N, geometry::base_point(N)), N, 0.5,
                                   rng);
  }
  static geometry::TwistedSpinorField make_spinor(const geometry::MapField& u,
                                                  const geometry::TargetManifold& N) {
    geometry::Rng rng(2);
    return geometry::random_tangent_spinor(u, N, rng);
  }

  geometry::TargetManifold N;
  geometry::TorusDomain d;
  geometry::MapField u;
  geometry::TwistedSpinorField psi;
};

Exec policy(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_ProjectMap(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  ScopedExec ex(policy(st));
  for (auto _ : st) benchmark::DoNotOptimize(geometry::project_map(f.u, f.N));
}

void BM_DiracAlongMap(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  ScopedExec ex(policy(st));
  for (auto _ : st) benchmark::DoNotOptimize(dirac::dirac_along_map(f.N, f.u, f.psi));
}

void BM_AssembledApply(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  ScopedExec ex(policy(st));
  const dirac::DiracOperator op(f.N, f.u);
  std::vector<cd> x(op.dim(), cd(1.0, 0.5)), y(op.dim());
  for (auto _ : st) {
    op.apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_MapRhs(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  ScopedExec ex(policy(st));
  for (auto _ : st) benchmark::DoNotOptimize(flow::map_rhs(f.N, f.u, &f.psi, 1.1));
}

void grid(benchmark::internal::Benchmark* b) {
  for (int n : {32, 64, 128})
    for (int p : {0, 1}) b->Args({n, p});
  b->ArgNames({"n", "parallel"});
}

BENCHMARK(BM_ProjectMap)->Apply(grid);
BENCHMARK(BM_DiracAlongMap)->Apply(grid);
BENCHMARK(BM_AssembledApply)->Apply(grid);
BENCHMARK(BM_MapRhs)->Apply(grid);

}  // namespace

BENCHMARK_MAIN();
