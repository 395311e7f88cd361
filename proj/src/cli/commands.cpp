#include "dhflow/cli/commands.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dhflow/io/output.hpp"
#include "dhflow/validation/validation.hpp"

namespace dhflow::cli {

namespace {

using io::fs::path;
using io::json;

void report_error(const path& out, const char* kind, const std::string& msg) {
  const json j = {{"format_version", io::kFormatVersion}, {"error", kind}, {"message", msg}};
  std::cerr << j.dump() << '\n';
  try {
    io::write_json(out / "error.json", j);
  } catch (const std::exception&) {
    // The directory itself may be the problem; stderr already has it.
  }
}

template <class F>
int guarded(const path& out, F&& f) {
  try {
    // A stale report from an earlier run in the same directory would lie.
    io::fs::remove(out / "error.json");
    return f();
  } catch (const ConfigError& e) {
    report_error(out, "config", e.what());
    return kConfigError;
  } catch (const RestartExhausted& e) {
    report_error(out, "restart_exhausted", e.what());
    return kRestartExhausted;
  } catch (const std::exception& e) {
    report_error(out, "numerical", e.what());
    return kNumericalFailure;
  }
}

json diag_json(const flow::FlowState& s) {
  const auto& d = s.diag;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"t", s.t},
          {"step", s.step},
          {"alpha", s.alpha},
          {"E_alpha", num(d.E_alpha)},
          {"E_dirichlet", num(d.E_dirichlet)},
          {"dissipation", num(d.dissipation)},
          {"gap_lambda", num(d.gap)},
          {"kernel_dim", d.kernel_dim},
          {"psi_l2", num(d.psi_l2)},
          {"map_residual", num(d.map_residual)},
          {"spinor_residual", num(d.spinor_residual)}};
}

// CSV rows with the events attached to the state they concern: an event
// carrying the step of the pending row joins it, later ones wait for the
// next state.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const path& file, int stride, bool append)
      : csv_(file, append), stride_(stride) {}

  void state(const flow::FlowState& s, const flow::RunProgress& p) {
    flush(false);
    pending_ = Row{s.t, s.step, s.diag, std::move(queued_), p.steps % stride_ == 0};
    queued_.clear();
  }
  void event(const flow::FlowEvent& e) {
    const std::string kind = flow::to_string(e.kind);
    if (pending_ && e.step == pending_->step) append(pending_->events, kind);
    else append(queued_, kind);
  }
  void finish() {
    flush(true);
    csv_.flush();
  }

 private:
  struct Row {
    double t;
    long step;
    flow::Diagnostics diag;
    std::string events;
    bool keep;
  };
  static void append(std::string& list, const std::string& kind) {
    if (!list.empty()) list += ';';
    list += kind;
  }
  void flush(bool last) {
    if (!pending_) return;
    if (pending_->keep || last || !pending_->events.empty())
      csv_.row(pending_->t, pending_->diag, pending_->events);
    pending_.reset();
  }

  io::CsvWriter csv_;
  int stride_;
  std::optional<Row> pending_;
  std::string queued_;
};

struct Setup {
  geometry::TorusDomain domain;
  geometry::TargetManifold target;
};

Setup setup(const io::RunConfig& cfg) {
  return {cfg.domain.build(), cfg.target.build()};
}

std::optional<io::Checkpoint> load_checkpoint(const io::RunConfig& cfg, const Setup& s) {
  if (cfg.initial.generator != "checkpoint") return std::nullopt;
  io::Checkpoint ck = io::read_checkpoint(cfg.initial.path, s.domain, s.target.ambient_dim());
  if (ck.physics_hash != io::physics_hash(cfg))
    throw ConfigError("initial.path: checkpoint physics hash " + io::hex64(ck.physics_hash) +
                      " does not match the config (" + io::hex64(io::physics_hash(cfg)) + ")");
  return ck;
}

void progress_line(const CommandOptions& opt, const flow::FlowState& s) {
  if (opt.quiet) return;
  std::fprintf(stderr, "t=%-10.4g step=%-7ld E_alpha=%-14.8g gap=%-10.3g kernel=%d\n", s.t, s.step,
               s.diag.E_alpha, s.diag.gap, s.diag.kernel_dim);
}

void event_line(const CommandOptions& opt, const flow::FlowEvent& e) {
  if (opt.quiet) return;
  std::fprintf(stderr, "event %s at t=%.6g step=%ld: %s\n", flow::to_string(e.kind).c_str(), e.t,
               e.step, e.message.c_str());
}

int exit_for(flow::Terminal t) {
  return t == flow::Terminal::RestartExhausted ? kRestartExhausted : kOk;
}

}  // namespace

int cmd_spectrum(const io::RunConfig& cfg, const CommandOptions& opt) {
  const path out = cfg.output.directory;
  return guarded(out, [&] {
    io::write_resolved_config(out, cfg);
    const Setup s = setup(cfg);
    const auto ck = load_checkpoint(cfg, s);
    const geometry::MapField u = ck ? ck->state.u : io::initial_map(cfg, s.target, s.domain);
    const dirac::DiracOperator op(s.target, geometry::project_map(u, s.target));
    dirac::SpectrumOptions so;
    so.k = cfg.spectrum.k;
    so.tau_ker = cfg.spectrum.tau_ker;
    so.method = cfg.spectrum.method;
    so.dense_max_dim = cfg.spectrum.dense_max_dim;
    so.seed = cfg.seed;
    const dirac::SpectralReport rep = dirac::compute_spectrum(op, so);
    json j = io::spectrum_json(rep);
    j["seed"] = cfg.seed;
    io::write_json(out / "spectrum.json", j);
    if (cfg.spectrum.dump_eigenvectors) io::write_eigenvectors(out / "eigenvectors", rep);
    if (!opt.quiet)
      std::fprintf(stderr, "kernel_dim_complex=%d gap=%.6g method=%s\n", rep.kernel_dim, rep.gap,
                   rep.method.c_str());
    return static_cast<int>(kOk);
  });
}

int cmd_flow(const io::RunConfig& cfg_in, const CommandOptions& opt) {
  const path out = cfg_in.output.directory;
  return guarded(out, [&] {
    io::RunConfig cfg = cfg_in;
    io::write_resolved_config(out, cfg);
    const Setup s = setup(cfg);
    flow::FlowConfig fc = cfg.flow;
    // Samples kept in memory are only the endpoints; the CSV is the record.
    fc.sample_stride = 1 << 30;

    const auto ck = load_checkpoint(cfg, s);
    std::optional<flow::FlowState> start;
    flow::RunOptions ro;
    if (ck) {
      start.emplace(ck->state);
      flow::refresh_diagnostics(s.target, fc, *start);
      ro.resume = ck->progress;
    } else {
      start.emplace(flow::initial_state(s.target, fc, io::initial_map(cfg, s.target, s.domain)));
    }

    const std::uint64_t phash = io::physics_hash(cfg);
    TrajectoryWriter writer(out / "trajectory.csv", cfg.output.sample_stride, false);
    std::optional<flow::FlowState> last;
    flow::RunProgress last_progress = ck ? ck->progress : flow::RunProgress{};
    ro.on_state = [&](const flow::FlowState& st, const flow::RunProgress& p) {
      writer.state(st, p);
      last_progress = p;
      const int cs = cfg.output.checkpoint_stride;
      if (cs > 0 && p.steps > 0 && p.steps % cs == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%08ld", p.steps);
        io::write_checkpoint(out / "checkpoints" / name, st, p, phash);
      }
      if (p.steps % 100 == 0) progress_line(opt, st);
    };
    ro.on_event = [&](const flow::FlowEvent& e) {
      writer.event(e);
      event_line(opt, e);
    };
    const flow::Trajectory tr = flow::run_flow(s.target, fc, *start, ro);
    writer.finish();
    const flow::FlowState& fin = tr.final_state();
    if (last_progress.steps % 100 != 0) progress_line(opt, fin);
    io::write_checkpoint(out / "checkpoints" / "final", fin, last_progress, phash);
    io::write_json(out / "events.json", io::events_json(tr.events));
    io::write_json(out / "summary.json",
                   {{"format_version", io::kFormatVersion},
                    {"terminal", flow::to_string(tr.terminal)},
                    {"monotonicity_violations", tr.monotonicity_violations},
                    {"tau_E", tr.tau_E},
                    {"steps", last_progress.steps},
                    {"restarts", last_progress.restarts},
                    {"resumed", ck.has_value()},
                    {"seed", cfg.seed},
                    {"physics_hash", io::hex64(phash)},
                    {"final", diag_json(fin)}});
    return exit_for(tr.terminal);
  });
}

int cmd_continue(const io::RunConfig& cfg, const CommandOptions& opt) {
  const path out = cfg.output.directory;
  return guarded(out, [&] {
    io::write_resolved_config(out, cfg);
    if (cfg.continuation.schedule.empty())
      throw ConfigError("continuation.schedule: required for continue");
    const Setup s = setup(cfg);
    flow::FlowConfig fc = cfg.flow;
    fc.sample_stride = 1 << 30;
    const auto ck = load_checkpoint(cfg, s);
    const geometry::MapField u0 = ck ? ck->state.u : io::initial_map(cfg, s.target, s.domain);
    const geometry::TwistedSpinorField* psi0 = ck ? &ck->state.psi : nullptr;

    flow::ContinuationOptions co;
    co.warm_start = cfg.continuation.warm_start;
    co.threshold = cfg.continuation.threshold;
    co.radii = cfg.continuation.radii;
    co.tail = cfg.continuation.tail;
    int stage = -1;
    std::optional<double> stage_alpha;
    std::unique_ptr<TrajectoryWriter> writer;
    auto stage_dir = [&](int i) {
      char name[32];
      std::snprintf(name, sizeof name, "stage_%02d", i);
      return out / name;
    };
    co.run.on_state = [&](const flow::FlowState& st, const flow::RunProgress& p) {
      // A new stage starts with its initial state at step 0.
      if (!stage_alpha || st.alpha != *stage_alpha || (p.steps == 0 && st.step == 0)) {
        if (writer) writer->finish();
        ++stage;
        stage_alpha = st.alpha;
        writer = std::make_unique<TrajectoryWriter>(stage_dir(stage) / "trajectory.csv",
                                                    cfg.output.sample_stride, false);
        if (!opt.quiet) std::fprintf(stderr, "stage %d: alpha = %.6g\n", stage, st.alpha);
      }
      writer->state(st, p);
      if (p.steps % 100 == 0) progress_line(opt, st);
    };
    co.run.on_event = [&](const flow::FlowEvent& e) {
      if (writer) writer->event(e);
      event_line(opt, e);
    };

    auto write_result = [&](const flow::ContinuationResult& res) {
      if (writer) writer->finish();
      json stages = json::array();
      for (std::size_t i = 0; i < res.stages.size(); ++i) {
        const auto& st = res.stages[i];
        json sj = {{"alpha", st.alpha},
                   {"terminal", flow::to_string(st.terminal)},
                   {"limit_only", st.limit_only},
                   {"monotonicity_violations", st.monotonicity_violations},
                   {"concentration_flagged", st.concentration.flagged},
                   {"final", diag_json(st.final_state)}};
        stages.push_back(sj);
        io::write_json(stage_dir(static_cast<int>(i)) / "events.json", io::events_json(st.events));
        io::write_checkpoint(stage_dir(static_cast<int>(i)) / "final", st.final_state, {},
                             io::physics_hash(cfg));
      }
      io::write_json(out / "stages.json", stages);
      io::write_json(out / "blowup_report.json", io::blowup_json(res.blowup));
    };

    try {
      const flow::ContinuationResult res =
          flow::alpha_continuation(s.target, fc, cfg.continuation.schedule, u0, psi0, co);
      write_result(res);
      if (!opt.quiet)
        std::fprintf(stderr, "continuation done: %zu stages, %zu flagged nodes\n", res.stages.size(),
                     res.blowup.flagged.size());
      return static_cast<int>(kOk);
    } catch (const flow::ContinuationFailure& e) {
      write_result(e.partial());
      report_error(out, "continuation", e.what());
      const auto& st = e.partial().stages;
      return !st.empty() && st.back().terminal == flow::Terminal::RestartExhausted
                 ? static_cast<int>(kRestartExhausted)
                 : static_cast<int>(kNumericalFailure);
    }
  });
}

int cmd_validate(const io::RunConfig& cfg, const CommandOptions& opt) {
  const path out = cfg.output.directory;
  return guarded(out, [&] {
    io::write_resolved_config(out, cfg);
    validation::SuiteOptions so;
    so.checks = cfg.validation.checks;
    so.tolerances = cfg.validation.tolerances;
    so.seed = cfg.seed;
    so.on_result = [&](const validation::CheckResult& r) {
      if (!opt.quiet) std::fprintf(stderr, "%s\n", validation::summary_line(r).c_str());
    };
    const auto results = validation::run_suite(so);
    io::write_json(out / "validation.json", validation::report_json(results, cfg.seed));
    io::write_json(out / "validation_timings.json", validation::report_json(results, cfg.seed, true));
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    return all ? static_cast<int>(kOk) : static_cast<int>(kNumericalFailure);
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Alpha-Dirac-harmonic map heat flow on flat 2-tori"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string chosen;
  for (const char* name : {"spectrum", "flow", "continue", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "run seed (overrides seed)");
    sub->add_flag("--quiet", quiet, "no progress on stderr");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(kConfigError);
  }

  io::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = io::load_config(config_path);
  } catch (const ConfigError& e) {
    report_error(out_dir.empty() ? path(cfg.output.directory) : path(out_dir), "config", e.what());
    return kConfigError;
  }
  if (!out_dir.empty()) cfg.output.directory = out_dir;
  if (app.get_subcommand(chosen)->count("--seed") > 0) {
    cfg.seed = seed;
    cfg.flow.seed = seed;
  }
  const CommandOptions opt{quiet};
  if (chosen == "spectrum") return cmd_spectrum(cfg, opt);
  if (chosen == "flow") return cmd_flow(cfg, opt);
  if (chosen == "continue") return cmd_continue(cfg, opt);
  return cmd_validate(cfg, opt);
}

}  // namespace dhflow::cli
