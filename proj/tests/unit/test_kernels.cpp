#include <doctest.h>

#include <vector>

#include "dhflow/dirac/operator.hpp"
#include "dhflow/flow/flow.hpp"
#include "dhflow/flow/terms.hpp"
#include "dhflow/geometry/generators.hpp"
#include "dhflow/kernels.hpp"

using namespace dhflow;
using geometry::TargetManifold;
using geometry::TorusDomain;

namespace {

struct Inputs {
  TargetManifold N = TargetManifold::sphere(2);
  TorusDomain d = TorusDomain::square(24);
  geometry::MapField u = [this] {
    geometry::Rng rng(8);
    return geometry::perturbed_map(geometry::constant_map(d, N, geometry::base_point(N)), N, 0.5,
                                   rng);
  }();
  geometry::TwistedSpinorField psi = [this] {
    geometry::Rng rng(9);
    return geometry::random_tangent_spinor(u, N, rng);
  }();
};

template <class F>
auto under(Exec e, F&& f) {
  ScopedExec scope(e);
  return f();
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const Inputs in;
  SUBCASE("projection") {
    const auto a = under(Exec::Serial, [&] { return geometry::project_map(in.u, in.N); });
    const auto b = under(Exec::Parallel, [&] { return geometry::project_map(in.u, in.N); });
    CHECK(a.values == b.values);
  }
  SUBCASE("operator along the map") {
    auto f = [&] { return dirac::dirac_along_map(in.N, in.u, in.psi).values; };
    CHECK(under(Exec::Serial, f) == under(Exec::Parallel, f));
  }
  SUBCASE("assembled operator") {
    auto f = [&] {
      const dirac::DiracOperator op(in.N, in.u);
      return op.apply(in.psi).values;
    };
    CHECK(under(Exec::Serial, f) == under(Exec::Parallel, f));
  }
  SUBCASE("map right-hand side with spinor") {
    auto f = [&] { return flow::map_rhs(in.N, in.u, &in.psi, 1.3); };
    CHECK(under(Exec::Serial, f) == under(Exec::Parallel, f));
  }
  SUBCASE("reductions") {
    auto f = [&] { return geometry::l2_norm(in.psi); };
    CHECK(under(Exec::Serial, f) == under(Exec::Parallel, f));
  }
}

TEST_CASE("a flow step is identical under both policies") {
  const TargetManifold N = TargetManifold::circle_torus(1);
  const TorusDomain d = TorusDomain::square(16);
  geometry::Rng rng(5);
  const auto u0 = geometry::perturbed_map(geometry::winding_map(d, N, 1, 0), N, 0.1, rng);
  flow::FlowConfig cfg;
  cfg.dt = 1e-2;
  auto run = [&] {
    const flow::FlowState s = flow::initial_state(N, cfg, u0);
    const flow::StepResult r = flow::step(N, cfg, s, cfg.dt, 1e-9 * s.diag.E_alpha);
    return std::make_pair(r.state.u.values, r.state.psi.values);
  };
  const auto a = under(Exec::Serial, run);
  const auto b = under(Exec::Parallel, run);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("the lowest failing index wins under parallel execution") {
  for (Exec e : {Exec::Serial, Exec::Parallel}) {
    try {
      for_each_index(
          1000,
          [](std::size_t i) {
            if (i % 97 == 13) throw std::runtime_error(std::to_string(i));
          },
          e);
      FAIL("expected a throw");
    } catch (const std::runtime_error& err) {
      CHECK(std::string(err.what()) == "13");
    }
  }
}
