#include "dhflow/flow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dhflow/flow/energy.hpp"
#include "dhflow/geometry/generators.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow::flow {

namespace {

dirac::SpectrumOptions spectrum_options(const FlowConfig& cfg,
                                        const std::vector<TwistedSpinorField>* warm) {
  dirac::SpectrumOptions o;
  o.k = cfg.spectrum_k;
  o.tau_ker = cfg.tau_ker;
  o.method = cfg.eigen_method;
  o.dense_max_dim = cfg.dense_max_dim;
  o.seed = cfg.seed;
  o.warm = warm;
  return o;
}

// int |P rhs|^2: the rate of the flow at a state, before any step is taken.
double instantaneous_dissipation(const TargetManifold& N, const FlowState& s) {
  const int q = s.u.q;
  const TwistedSpinorField* psi = s.report ? &s.psi : nullptr;
  const std::vector<double> rhs = map_rhs(N, s.u, psi, s.alpha);
  return s.u.domain.cell_area() * ordered_sum(s.u.nodes(), [&](std::size_t x) {
    std::vector<double> P(q * q);
    N.jacobian(s.u.at(x), P.data());
    double acc = 0.0;
    for (int A = 0; A < q; ++A) {
      double t = 0.0;
      for (int B = 0; B < q; ++B) t += P[A * q + B] * rhs[x * q + B];
      acc += t * t;
    }
    return acc;
  });
}

// Tangential map rhs (spinor-free) scaled to unit maximal nodal length, or
// empty when the map is stationary.
std::vector<double> descent_direction(const TargetManifold& N, const FlowState& s) {
  const int q = s.u.q;
  const std::vector<double> rhs = map_rhs(N, s.u, nullptr, s.alpha);
  std::vector<double> v(rhs.size(), 0.0), P(q * q);
  double sup = 0.0;
  for (std::size_t x = 0; x < s.u.nodes(); ++x) {
    N.jacobian(s.u.at(x), P.data());
    double len = 0.0;
    for (int A = 0; A < q; ++A) {
      double t = 0.0;
      for (int B = 0; B < q; ++B) t += P[A * q + B] * rhs[x * q + B];
      v[x * q + A] = t;
      len += t * t;
    }
    sup = std::max(sup, std::sqrt(len));
  }
  if (!(sup > 0.0)) return {};
  for (double& c : v) c /= sup;
  return v;
}

[[noreturn]] void throw_not_isolated(const FlowConfig& cfg, const dirac::SpectralReport& rep) {
  std::ostringstream os;
  os << "kernel not isolated: dim " << rep.kernel_dim << ", gap " << rep.gap << " (need dim 2, gap > "
     << std::max(10.0 * rep.tau_ker, cfg.lambda_min) << ")";
  throw KernelNotMinimal(os.str(), rep.kernel_dim, rep.gap);
}

// State at u with a fresh spectrum and the deterministic kernel spinor.
FlowState fresh_state(const TargetManifold& N, const FlowConfig& cfg, const FlowState& like,
                      MapField u, std::uint64_t seed) {
  FlowState s(std::move(u), TwistedSpinorField(like.u.domain, like.u.q), like.alpha, like.t,
              like.step);
  if (cfg.spinor_mode == SpinorMode::Kernel) {
    const dirac::DiracOperator op(N, s.u);
    dirac::SpectralReport rep = dirac::compute_spectrum(op, spectrum_options(cfg, nullptr));
    if (!kernel_isolated(cfg, rep)) throw_not_isolated(cfg, rep);
    s.psi = dirac::kernel_spinor(op, rep, seed);
    s.report = std::move(rep);
  }
  refresh_diagnostics(N, cfg, s);
  s.diag.dissipation = instantaneous_dissipation(N, s);
  s.diag.weighted_dissipation = 0.0;
  return s;
}

}  // namespace

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Stationary: return "Stationary";
    case EventKind::SingularTime: return "SingularTime";
    case EventKind::Restart: return "Restart";
    case EventKind::BlowupSuspected: return "BlowupSuspected";
    case EventKind::StepRejected: return "StepRejected";
    case EventKind::Failure: return "Failure";
  }
  return "?";
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::Stationary: return "Stationary";
    case Terminal::TimeLimit: return "TimeLimit";
    case Terminal::StepLimit: return "StepLimit";
    case Terminal::RestartExhausted: return "RestartExhausted";
  }
  return "?";
}

void FlowConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("flow." + m); };
  if (!(alpha >= 1.0)) fail("alpha: must be >= 1");
  if (!(dt > 0.0)) fail("dt: must be positive");
  if (!(t_max >= 0.0)) fail("t_max: must be non-negative");
  if (!(tau_stat >= 0.0) && !(tau_stat <= 0.0)) fail("tau_stat: is NaN");
  if (!(lambda_min >= 0.0)) fail("lambda_min: must be non-negative");
  if (!(tau_E_factor >= 0.0)) fail("tau_E_factor: must be non-negative");
  if (max_halvings < 0) fail("max_halvings: must be non-negative");
  if (spectrum_k < 4) fail("spectrum_k: must be at least 4");
  if (sample_stride < 1) fail("sample_stride: must be at least 1");
  if (max_steps < 0) fail("max_steps: must be non-negative");
  if (restart.amplitudes.empty()) fail("restart.amplitudes: must not be empty");
  for (double a : restart.amplitudes)
    if (!(a > 0.0)) fail("restart.amplitudes: entries must be positive");
  if (restart.pairs_per_amplitude < 1) fail("restart.pairs_per_amplitude: must be at least 1");
  if (restart.max_restarts < 0) fail("restart.max_restarts: must be non-negative");
}

double FlowConfig::resolved_tau_stat(const geometry::TorusDomain& d) const {
  return tau_stat > 0.0 ? tau_stat : 1e-8 * d.area();
}

bool kernel_isolated(const FlowConfig& cfg, const dirac::SpectralReport& rep) {
  return rep.kernel_dim == 2 && rep.gap > std::max(10.0 * rep.tau_ker, cfg.lambda_min);
}

void refresh_diagnostics(const TargetManifold& N, const FlowConfig& cfg, FlowState& s) {
  (void)cfg;
  Diagnostics& d = s.diag;
  d.E_alpha = energy_alpha(s.u, s.alpha);
  d.E_dirichlet = dirichlet_energy(s.u);
  d.psi_l2 = geometry::l2_norm(s.psi);
  const ElResidual r = el_residual(N, s.u, s.report ? &s.psi : nullptr, s.alpha);
  d.map_residual = r.map;
  d.spinor_residual = r.spinor;
  if (s.report) {
    d.kernel_dim = s.report->kernel_dim;
    d.gap = s.report->gap;
  } else {
    d.kernel_dim = 0;
    d.gap = std::numeric_limits<double>::quiet_NaN();
  }
}

FlowState initial_state(const TargetManifold& N, const FlowConfig& cfg, const MapField& u0,
                        const TwistedSpinorField* psi_ref) {
  cfg.validate();
  FlowState s(geometry::project_map(u0, N), TwistedSpinorField(u0.domain, u0.q), cfg.alpha);
  if (cfg.spinor_mode == SpinorMode::Kernel) {
    const dirac::DiracOperator op(N, s.u);
    dirac::SpectralReport rep = dirac::compute_spectrum(op, spectrum_options(cfg, nullptr));
    if (!kernel_isolated(cfg, rep)) throw_not_isolated(cfg, rep);
    if (psi_ref) {
      // The reference is taken to live along u0 itself (checkpoints, warm
      // starts), so the transport is the identity up to projection.
      s.psi = dirac::solve_constraint(op, rep, s.u, *psi_ref, psi_ref, dirac::kDefaultTauProj).psi;
    } else {
      s.psi = dirac::kernel_spinor(op, rep, cfg.seed);
    }
    s.report = std::move(rep);
  }
  refresh_diagnostics(N, cfg, s);
  s.diag.dissipation = instantaneous_dissipation(N, s);
  return s;
}

StepResult step(const TargetManifold& N, const FlowConfig& cfg, const FlowState& s, double dt,
                double tau_E) {
  const TorusDomain& dom = s.u.domain;
  const int q = s.u.q;
  const std::size_t len = s.u.values.size();
  const bool kernel_mode = cfg.spinor_mode == SpinorMode::Kernel;
  const geometry::Spectral sp(dom);

  // Explicit part: everything in the rhs except the Laplacian.
  std::vector<double> nl = map_rhs(N, s.u, kernel_mode ? &s.psi : nullptr, s.alpha);
  {
    std::vector<double> lap(len);
    sp.laplacian(s.u.values.data(), q, lap.data());
    for (std::size_t i = 0; i < len; ++i) nl[i] -= lap[i];
  }
  const std::vector<double> w = alpha_weight(MapJet(sp, s.u), s.alpha);
  const double E0 = s.diag.E_alpha;

  std::string last_reason;
  for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, dt *= 0.5) {
    MapField z(dom, q);
    {
      std::vector<double> b(len);
      for (std::size_t i = 0; i < len; ++i) b[i] = s.u.values[i] + dt * nl[i];
      sp.solve_helmholtz(b.data(), q, dt, z.values.data());
    }
    FlowState next(MapField(dom, q), TwistedSpinorField(dom, q), s.alpha, s.t + dt, s.step + 1);
    try {
      next.u = geometry::project_map(z, N);
    } catch (const TubeViolation& e) {
      last_reason = e.what();
      continue;
    }
    const double E1 = energy_alpha(next.u, s.alpha);
    if (E1 > E0 + tau_E) {
      std::ostringstream os;
      os << "E^alpha rose from " << E0 << " to " << E1;
      last_reason = os.str();
      continue;
    }
    double proj_norm = 1.0;
    if (kernel_mode) {
      const std::vector<TwistedSpinorField> warm{s.psi};
      const dirac::DiracOperator op(N, next.u);
      dirac::SpectralReport rep = dirac::compute_spectrum(op, spectrum_options(cfg, &warm));
      if (!kernel_isolated(cfg, rep)) {
        try {
          throw_not_isolated(cfg, rep);
        } catch (const KernelNotMinimal& e) {
          next.report = std::move(rep);
          refresh_diagnostics(N, cfg, next);
          throw SingularMap(e, std::move(next));
        }
      }
      try {
        dirac::ConstraintResult c =
            dirac::solve_constraint(op, rep, s.u, s.psi, &s.psi, dirac::kDefaultTauProj);
        next.psi = std::move(c.psi);
        proj_norm = c.projection_norm;
      } catch (const ProjectionDegenerate& e) {
        last_reason = e.what();
        continue;
      }
      next.report = std::move(rep);
    }
    refresh_diagnostics(N, cfg, next);
    next.diag.projection_norm = proj_norm;
    const double a = dom.cell_area();
    std::vector<double> v2(s.u.nodes());
    for (std::size_t x = 0; x < v2.size(); ++x) {
      double acc = 0.0;
      for (int A = 0; A < q; ++A) {
        const double v = (next.u.values[x * q + A] - s.u.values[x * q + A]) / dt;
        acc += v * v;
      }
      v2[x] = acc;
    }
    next.diag.dissipation = a * ordered_sum(v2.size(), [&](std::size_t x) { return v2[x]; });
    next.diag.weighted_dissipation =
        a * ordered_sum(v2.size(), [&](std::size_t x) { return w[x] * v2[x]; });
    return {std::move(next), dt, halvings};
  }
  throw StepRejected("step rejected after " + std::to_string(cfg.max_halvings) +
                     " halvings: " + last_reason);
}

RestartResult restart_map(const TargetManifold& N, const FlowConfig& cfg, const FlowState& s,
                          std::uint64_t seed) {
  const double E0 = energy_alpha(s.u, s.alpha);
  if (cfg.spinor_mode == SpinorMode::Kernel && s.report && kernel_isolated(cfg, *s.report))
    return {s, E0, E0, 0, 0.0, false};

  std::vector<int> inv0;
  try {
    inv0 = analysis::homotopy_invariants(N, s.u);
  } catch (const Error& e) {
    throw RestartExhausted(std::string("homotopy invariants of the current map: ") + e.what());
  }
  int attempts = 0;
  auto try_candidate = [&](const std::vector<double>& eta, double a) -> std::optional<FlowState> {
    ++attempts;
    MapField z = s.u;
    for (std::size_t i = 0; i < z.values.size(); ++i) z.values[i] += a * eta[i];
    try {
      MapField cand = geometry::project_map(z, N);
      if (!(energy_alpha(cand, s.alpha) < E0)) return std::nullopt;
      if (analysis::homotopy_invariants(N, cand) != inv0) return std::nullopt;
      return fresh_state(N, cfg, s, std::move(cand), seed);
    } catch (const KernelNotMinimal&) {
    } catch (const ProjectionDegenerate&) {
    } catch (const TubeViolation&) {
    } catch (const AngleJumpTooLarge&) {
    } catch (const DegreeNotNearInteger&) {
    }
    return std::nullopt;
  };
  auto accept = [&](FlowState next, double amp) {
    const double E1 = next.diag.E_alpha;
    return RestartResult{std::move(next), E0, E1, attempts, amp, true};
  };

  const std::vector<double> descent =
      cfg.restart.descent_candidate ? descent_direction(N, s) : std::vector<double>{};
  geometry::Rng rng(seed);
  for (double amp : cfg.restart.amplitudes) {
    if (!descent.empty())
      if (auto next = try_candidate(descent, amp)) return accept(std::move(*next), amp);
    for (int p = 0; p < cfg.restart.pairs_per_amplitude; ++p) {
      const std::vector<double> eta =
          geometry::smooth_random_field(s.u.domain, s.u.q, cfg.restart.max_mode, rng);
      for (double sign : {1.0, -1.0})
        if (auto next = try_candidate(eta, sign * amp)) return accept(std::move(*next), amp);
    }
  }
  std::ostringstream os;
  os << "no admissible restart among " << attempts << " candidates";
  throw RestartExhausted(os.str());
}

Trajectory run_flow(const TargetManifold& N, const FlowConfig& cfg, const FlowState& start,
                    const RunOptions& opts) {
  cfg.validate();
  Trajectory tr;
  RunProgress prog;
  if (opts.resume) {
    prog = *opts.resume;
  } else {
    prog.tau_E = cfg.tau_E_factor * start.diag.E_alpha;
    prog.seg_E0 = start.diag.E_alpha;
  }
  tr.tau_E = prog.tau_E;
  tr.monotonicity_violations = prog.monotonicity_violations;
  const double tau_stat = cfg.resolved_tau_stat(start.u.domain);

  auto emit = [&](FlowEvent ev) {
    if (opts.on_event) opts.on_event(ev);
    tr.events.push_back(std::move(ev));
  };
  auto observe = [&](const FlowState& st) {
    prog.monotonicity_violations = tr.monotonicity_violations;
    if (opts.on_state) opts.on_state(st, prog);
  };

  FlowState state = start;
  tr.samples.push_back(state);
  if (!opts.resume) observe(state);
  if (!opts.resume && cfg.stop_on_stationary && state.diag.dissipation < tau_stat) {
    tr.terminal = Terminal::Stationary;
    emit({EventKind::Stationary, state.t, state.step,
          {{"dissipation", state.diag.dissipation}, {"tau_stat", tau_stat}},
          "initial state is stationary"});
    return tr;
  }

  bool last_sampled = true;
  tr.terminal = Terminal::TimeLimit;
  const double t_eps = 1e-12 * cfg.dt;

  while (state.t < cfg.t_max - t_eps) {
    if (cfg.max_steps > 0 && prog.steps >= cfg.max_steps) {
      tr.terminal = Terminal::StepLimit;
      break;
    }
    const double dt = std::min(cfg.dt, cfg.t_max - state.t);
    StepResult r{.state = state};
    try {
      r = step(N, cfg, state, dt, tr.tau_E);
    } catch (const SingularMap& e) {
      emit({EventKind::SingularTime, e.state().t, e.state().step,
            {{"kernel_dim", static_cast<double>(e.kernel_dim())},
             {"gap", e.gap()},
             {"E_alpha", e.state().diag.E_alpha}},
            e.what()});
      try {
        if (prog.restarts >= cfg.restart.max_restarts)
          throw RestartExhausted("restart limit " + std::to_string(cfg.restart.max_restarts) +
                                 " reached");
        ++prog.restarts;
        RestartResult rr =
            restart_map(N, cfg, e.state(), cfg.seed + 0x9e3779b97f4a7c15ULL * prog.restarts);
        if (!(rr.E_after < rr.E_before)) ++tr.monotonicity_violations;
        emit({EventKind::Restart, rr.state.t, rr.state.step,
              {{"E_before", rr.E_before},
               {"E_after", rr.E_after},
               {"amplitude", rr.amplitude},
               {"attempts", static_cast<double>(rr.attempts)},
               {"kernel_dim", static_cast<double>(rr.state.diag.kernel_dim)},
               {"gap", rr.state.diag.gap}},
              "restarted from a perturbed homotopic map"});
        state = std::move(rr.state);
        prog.seg_E0 = state.diag.E_alpha;
        prog.seg_cum = 0.0;
        tr.samples.push_back(state);
        last_sampled = true;
        observe(state);
        continue;
      } catch (const RestartExhausted& x) {
        tr.terminal = Terminal::RestartExhausted;
        emit({EventKind::Failure, state.t, state.step, {}, x.what()});
        break;
      }
    }
    if (r.halvings > 0)
      emit({EventKind::StepRejected, state.t, state.step,
            {{"halvings", static_cast<double>(r.halvings)}, {"dt_used", r.dt_used}},
            "dt halved"});
    if (r.state.diag.E_alpha > state.diag.E_alpha + tr.tau_E) ++tr.monotonicity_violations;
    state = std::move(r.state);
    ++prog.steps;
    prog.seg_cum += r.dt_used * state.diag.weighted_dissipation;
    tr.ledger.push_back({state.t, r.dt_used, state.diag.E_alpha,
                         state.diag.weighted_dissipation,
                         state.diag.E_alpha - prog.seg_E0 + state.alpha * prog.seg_cum});
    last_sampled = prog.steps % cfg.sample_stride == 0;
    if (last_sampled) tr.samples.push_back(state);
    observe(state);
    if (cfg.stop_on_stationary && state.diag.dissipation < tau_stat) {
      tr.terminal = Terminal::Stationary;
      emit({EventKind::Stationary, state.t, state.step,
            {{"dissipation", state.diag.dissipation},
             {"tau_stat", tau_stat},
             {"map_residual", state.diag.map_residual},
             {"spinor_residual", state.diag.spinor_residual}},
            "dissipation below threshold"});
      break;
    }
  }
  if (!last_sampled) tr.samples.push_back(state);
  return tr;
}

ContinuationResult alpha_continuation(const TargetManifold& N, const FlowConfig& cfg,
                                      const std::vector<double>& schedule, const MapField& u0,
                                      const TwistedSpinorField* psi0,
                                      const ContinuationOptions& opts) {
  if (schedule.empty()) throw ConfigError("continuation: empty alpha schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] >= 1.0)) throw ConfigError("continuation: alpha below 1 in schedule");
    if (schedule[i] == 1.0 && i + 1 != schedule.size())
      throw ConfigError("continuation: alpha = 1 is only allowed as the final entry");
    if (i > 0 && !(schedule[i] < schedule[i - 1]))
      throw ConfigError("continuation: schedule must be strictly decreasing");
  }
  const TorusDomain& dom = u0.domain;
  const std::vector<double> radii = opts.radii.empty() ? analysis::default_radii(dom) : opts.radii;
  double threshold = opts.threshold;
  if (!(threshold > 0.0)) {
    threshold = 0.1 * dirichlet_energy(geometry::project_map(u0, N));
    // A constant start has no energy to concentrate; keep the flag set
    // meaningful instead of flagging every node at threshold 0.
    if (!(threshold > 0.0)) threshold = 1e-8 * dom.area();
  }

  ContinuationResult res;
  res.blowup.threshold = threshold;
  res.blowup.radii = radii;
  auto abort = [&](const std::string& why) -> ContinuationFailure {
    return ContinuationFailure(why, res);
  };

  std::optional<FlowState> prev;
  for (double alpha : schedule) {
    FlowConfig stage_cfg = cfg;
    stage_cfg.alpha = alpha;
    const bool limit_only = alpha == 1.0 && schedule.size() > 1;
    try {
      FlowState start = [&] {
        if (prev && (opts.warm_start || limit_only)) {
          FlowState s = *prev;
          s.alpha = alpha;
          s.t = 0.0;
          s.step = 0;
          refresh_diagnostics(N, stage_cfg, s);
          s.diag.dissipation = instantaneous_dissipation(N, s);
          s.diag.weighted_dissipation = 0.0;
          return s;
        }
        return initial_state(N, stage_cfg, u0, psi0);
      }();
      StageResult st{.alpha = alpha, .final_state = start, .terminal = Terminal::TimeLimit,
                     .events = {}, .monotonicity_violations = 0, .concentration = {},
                     .limit_only = limit_only};
      if (!limit_only) {
        Trajectory tr = run_flow(N, stage_cfg, start, opts.run);
        st.final_state = tr.final_state();
        st.terminal = tr.terminal;
        st.events = std::move(tr.events);
        st.monotonicity_violations = tr.monotonicity_violations;
        if (tr.terminal == Terminal::RestartExhausted) {
          res.stages.push_back(std::move(st));
          throw abort("continuation: restarts exhausted at alpha = " + std::to_string(alpha));
        }
      }
      st.concentration = analysis::concentration_monitor({st.final_state.u}, radii, threshold);
      res.blowup.alphas.push_back(alpha);
      res.blowup.psi_l2.push_back(st.final_state.diag.psi_l2);
      res.blowup.dirichlet.push_back(st.final_state.diag.E_dirichlet);
      prev = st.final_state;
      res.stages.push_back(std::move(st));
    } catch (const ContinuationFailure&) {
      throw;
    } catch (const Error& e) {
      throw abort("continuation: stage alpha = " + std::to_string(alpha) + " failed: " + e.what());
    }
  }

  const int n_stages = static_cast<int>(res.stages.size());
  const int tail = opts.tail > 0 ? std::min(opts.tail, n_stages) : std::max(1, n_stages / 2);
  std::vector<MapField> tail_states;
  for (int i = n_stages - tail; i < n_stages; ++i) tail_states.push_back(res.stages[i].final_state.u);
  res.blowup.flagged = analysis::concentration_monitor(tail_states, radii, threshold).flagged;
  if (!res.blowup.flagged.empty()) {
    StageResult& last = res.stages.back();
    last.events.push_back({EventKind::BlowupSuspected, last.final_state.t, last.final_state.step,
                           {{"flagged", static_cast<double>(res.blowup.flagged.size())},
                            {"threshold", threshold}},
                           "local energy stays above threshold across the schedule tail"});
  }
  return res;
}

}  // namespace dhflow::flow
