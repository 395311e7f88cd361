#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dhflow/errors.hpp"
#include "dhflow/flow/energy.hpp"
#include "dhflow/flow/flow.hpp"
#include "dhflow/geometry/generators.hpp"

using namespace dhflow;
using geometry::TargetManifold;
using geometry::TorusDomain;

TEST_CASE("a constant map with its kernel spinor is stationary at once") {
  const TargetManifold N = TargetManifold::circle_torus(1);
  const TorusDomain d = TorusDomain::square(12);
  flow::FlowConfig cfg;
  const auto s = flow::initial_state(N, cfg, geometry::constant_map(d, N, geometry::base_point(N)));
  const flow::Trajectory tr = flow::run_flow(N, cfg, s);
  CHECK(tr.terminal == flow::Terminal::Stationary);
  CHECK(tr.samples.size() == 1);
  CHECK(tr.final_state().step == 0);
  // E^alpha of a constant map: (1/2) int 1 = Area / 2.
  CHECK(tr.final_state().diag.E_alpha == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("spinor-free flow on S^2 lowers the energy every step") {
  const TargetManifold N = TargetManifold::sphere(2);
  const TorusDomain d = TorusDomain::square(16);
  geometry::Rng rng(3);
  const auto u0 = geometry::perturbed_map(geometry::constant_map(d, N, geometry::base_point(N)),
                                          N, 0.5, rng);
  flow::FlowConfig cfg;
  cfg.alpha = 1.2;
  cfg.dt = 2e-3;
  cfg.t_max = 0.05;
  cfg.spinor_mode = flow::SpinorMode::Zero;
  const flow::Trajectory tr = flow::run_flow(N, cfg, flow::initial_state(N, cfg, u0));
  CHECK(tr.monotonicity_violations == 0);
  CHECK(tr.terminal == flow::Terminal::TimeLimit);
  for (std::size_t i = 1; i < tr.samples.size(); ++i)
    CHECK(tr.samples[i].diag.E_alpha <= tr.samples[i - 1].diag.E_alpha + tr.tau_E);
  CHECK(geometry::on_target_residual(tr.final_state().u, N) < 1e-12);
  // Energy identity residual stays first order in dt.
  for (const auto& e : tr.ledger) CHECK(std::abs(e.residual) < 1e-2 * tr.samples[0].diag.E_alpha);
}

TEST_CASE("flow parameters are validated") {
  flow::FlowConfig cfg;
  cfg.alpha = 0.9;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 1.1;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("restart leaves a regular state alone") {
  const TargetManifold N = TargetManifold::circle_torus(1);
  const TorusDomain d = TorusDomain::square(16);
  flow::FlowConfig cfg;
  const auto s = flow::initial_state(N, cfg, geometry::winding_map(d, N, 1, 0));
  const flow::RestartResult r = flow::restart_map(N, cfg, s, 1);
  CHECK_FALSE(r.changed);
  CHECK(r.state.u.values == s.u.values);
}

TEST_CASE("continuation rejects a bad schedule") {
  const TargetManifold N = TargetManifold::circle_torus(1);
  const TorusDomain d = TorusDomain::square(8);
  flow::FlowConfig cfg;
  const auto u0 = geometry::constant_map(d, N, geometry::base_point(N));
  CHECK_THROWS_AS(flow::alpha_continuation(N, cfg, {1.1, 1.2}, u0, nullptr), ConfigError);
  CHECK_THROWS_AS(flow::alpha_continuation(N, cfg, {}, u0, nullptr), ConfigError);
  CHECK_THROWS_AS(flow::alpha_continuation(N, cfg, {1.2, 1.0, 1.1}, u0, nullptr), ConfigError);
}
