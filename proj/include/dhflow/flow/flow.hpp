#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dhflow/analysis/analysis.hpp"
#include "dhflow/dirac/constraint.hpp"
#include "dhflow/errors.hpp"
#include "dhflow/flow/terms.hpp"

namespace dhflow::flow {

using geometry::TorusDomain;

/// Kernel: psi is the constraint spinor psi(u). Zero: psi == 0 throughout
/// (admissible for the coupled system, used for targets without a minimal
/// kernel and for the harmonic-map baseline).
enum class SpinorMode { Kernel, Zero };

struct RestartPolicy {
  /// Perturbation amplitudes tried in order.
  std::vector<double> amplitudes{0.05, 0.025, 0.0125, 0.00625};
  /// Antithetic pairs (+eta, -eta) drawn per amplitude.
  int pairs_per_amplitude = 4;
  int max_mode = 2;
  /// Try the tangential energy-descent direction (unit maximal nodal length)
  /// before the random pairs at each amplitude. It lowers E^alpha at first
  /// order and carries the map across an eigenvalue crossing rather than
  /// back toward it.
  bool descent_candidate = true;
  /// Restarts allowed over one run.
  int max_restarts = 8;
};

struct FlowConfig {
  double alpha = 1.1;
  double dt = 1e-3;
  double t_max = 1.0;
  /// Stop when int |du/dt|^2 < tau_stat; <= 0 selects 1e-8 * Area.
  double tau_stat = 0.0;
  /// Kernel threshold; <= 0 selects 1e-6 * free spectral radius.
  double tau_ker = 0.0;
  /// Singular time when the gap drops below max(10 tau_ker, lambda_min).
  double lambda_min = 1e-4;
  /// Accepted steps may raise E^alpha by at most tau_E_factor * E^alpha(u0).
  double tau_E_factor = 1e-10;
  int max_halvings = 10;
  SpinorMode spinor_mode = SpinorMode::Kernel;
  RestartPolicy restart;
  std::uint64_t seed = 0;
  /// Eigenpairs computed per spectrum.
  int spectrum_k = 8;
  dirac::EigenMethod eigen_method = dirac::EigenMethod::Auto;
  std::size_t dense_max_dim = 1600;
  /// Record every sample_stride-th state in the trajectory (and the last).
  int sample_stride = 1;
  bool stop_on_stationary = true;
  /// 0 means no limit besides t_max.
  long max_steps = 0;

  /// Throws ConfigError: alpha >= 1 (1 allowed for the limit stage and the
  /// harmonic baseline), dt > 0, t_max >= 0, thresholds >= 0.
  void validate() const;
  double resolved_tau_stat(const geometry::TorusDomain& d) const;
};

struct Diagnostics {
  double E_alpha = 0.0;
  double E_dirichlet = 0.0;
  /// int |du/dt|^2 over the last step (instantaneous rate at t = 0).
  double dissipation = 0.0;
  /// int (1 + |grad u|^2)^(alpha-1) |du/dt|^2 over the last step.
  double weighted_dissipation = 0.0;
  double gap = 0.0;
  int kernel_dim = 0;
  double psi_l2 = 0.0;
  double map_residual = 0.0;
  double spinor_residual = 0.0;
  double projection_norm = 1.0;
};

struct FlowState {
  FlowState(MapField u_, TwistedSpinorField psi_, double alpha_, double t_ = 0.0, long step_ = 0)
      : t(t_), alpha(alpha_), step(step_), u(std::move(u_)), psi(std::move(psi_)) {}

  double t = 0.0;
  double alpha = 1.0;
  long step = 0;
  MapField u;
  TwistedSpinorField psi;
  /// Spectrum along u (absent in Zero mode).
  std::optional<dirac::SpectralReport> report;
  Diagnostics diag;
};

enum class EventKind { Stationary, SingularTime, Restart, BlowupSuspected, StepRejected, Failure };
std::string to_string(EventKind k);

struct FlowEvent {
  EventKind kind;
  double t = 0.0;
  long step = 0;
  std::map<std::string, double> payload;
  std::string message;
};

/// One accepted step of the energy ledger.
struct LedgerEntry {
  double t = 0.0;
  double dt = 0.0;
  double E_alpha = 0.0;
  double weighted_dissipation = 0.0;
  /// E(t_k) - E(0) + alpha * sum dt_j W_j over the current restart-free
  /// segment.
  double residual = 0.0;
};

enum class Terminal { Stationary, TimeLimit, StepLimit, RestartExhausted };
std::string to_string(Terminal t);

struct Trajectory {
  std::vector<FlowState> samples;
  std::vector<FlowEvent> events;
  std::vector<LedgerEntry> ledger;
  Terminal terminal = Terminal::TimeLimit;
  /// Accepted steps that raised E^alpha by more than tau_E, plus restarts
  /// that did not lower it.
  int monotonicity_violations = 0;
  double tau_E = 0.0;

  /// The last state is always sampled.
  const FlowState& final_state() const { return samples.back(); }
};

/// Builds the initial state: projects u0 onto N, computes the spectrum and
/// psi0 = psi(u0) with `psi_ref` as reference (or the deterministic kernel
/// spinor when null). Throws KernelNotMinimal if the kernel at u0 is not
/// minimal in Kernel mode.
FlowState initial_state(const TargetManifold& N, const FlowConfig& cfg, const MapField& u0,
                        const TwistedSpinorField* psi_ref = nullptr);

/// Fills E_alpha, E_dirichlet, psi_l2, residuals and spectral fields of
/// state.diag from the state itself.
void refresh_diagnostics(const TargetManifold& N, const FlowConfig& cfg, FlowState& state);

struct StepResult {
  FlowState state;
  double dt_used = 0.0;
  int halvings = 0;
};

/// Raised by step() when the proposed map has lost the isolated minimal
/// kernel; carries that map (with its spectrum, psi = 0) so the restart
/// starts from the singular map rather than the last regular one.
class SingularMap : public KernelNotMinimal {
 public:
  SingularMap(const KernelNotMinimal& e, FlowState at)
      : KernelNotMinimal(e), at_(std::make_shared<FlowState>(std::move(at))) {}
  const FlowState& state() const { return *at_; }

 private:
  std::shared_ptr<FlowState> at_;
};

/// One IMEX step: implicit spectral Laplacian, explicit nonlinear terms,
/// nodewise projection, then the constraint re-solve (phase aligned with the
/// transported spinor). A step that raises E^alpha by more than tau_E, leaves
/// the tube, or loses the kernel projection is retried with dt halved, at
/// most cfg.max_halvings times (then StepRejected).
/// Throws SingularMap when the proposed map has lost the minimal, isolated
/// kernel (singular time).
StepResult step(const TargetManifold& N, const FlowConfig& cfg, const FlowState& s, double dt,
                double tau_E);

/// True when the spectrum is minimal with gap above max(10 tau_ker, lambda_min).
bool kernel_isolated(const FlowConfig& cfg, const dirac::SpectralReport& rep);

struct RestartResult {
  FlowState state;
  double E_before = 0.0;
  double E_after = 0.0;
  int attempts = 0;
  double amplitude = 0.0;
  bool changed = false;
};

/// Samples u_new = pi(u + a eta) over the amplitude schedule (descent
/// direction first, then antithetic random pairs) and accepts the first candidate with an isolated minimal kernel,
/// lower E^alpha and identical homotopy invariants; psi_new is the
/// deterministic kernel spinor. A state whose kernel is already isolated is
/// returned unchanged. Throws RestartExhausted.
RestartResult restart_map(const TargetManifold& N, const FlowConfig& cfg, const FlowState& s,
                          std::uint64_t seed);

/// Driver bookkeeping beyond the state itself. A run resumed from a state
/// with the progress recorded at that state continues bit for bit.
struct RunProgress {
  double tau_E = 0.0;
  /// Energy at the start of the current restart-free segment and the
  /// accumulated sum dt_j W_j over it.
  double seg_E0 = 0.0;
  double seg_cum = 0.0;
  int restarts = 0;
  long steps = 0;
  int monotonicity_violations = 0;
};

struct RunOptions {
  /// Called after the initial state and after every accepted step or
  /// restart, with the progress that resumes from that state.
  std::function<void(const FlowState&, const RunProgress&)> on_state;
  /// Called for every event as it is emitted.
  std::function<void(const FlowEvent&)> on_event;
  /// Resume instead of starting: skips the initial stationarity check and
  /// the initial sample.
  std::optional<RunProgress> resume;
};

/// Runs the flow until stationarity, t_max, max_steps or restart
/// exhaustion (reported as a Failure event with terminal RestartExhausted).
Trajectory run_flow(const TargetManifold& N, const FlowConfig& cfg, const FlowState& start,
                    const RunOptions& opts = {});

struct StageResult {
  double alpha = 0.0;
  FlowState final_state;
  Terminal terminal = Terminal::TimeLimit;
  std::vector<FlowEvent> events;
  int monotonicity_violations = 0;
  analysis::ConcentrationReport concentration;
  /// true for a final alpha = 1 entry, which only evaluates the limit.
  bool limit_only = false;
};

struct BlowupReport {
  std::vector<double> alphas;
  std::vector<double> psi_l2;
  std::vector<double> dirichlet;
  double threshold = 0.0;
  std::vector<double> radii;
  /// Nodes flagged at every stage of the schedule tail.
  std::vector<std::size_t> flagged;
};

struct ContinuationResult {
  std::vector<StageResult> stages;
  BlowupReport blowup;
};

struct ContinuationOptions {
  bool warm_start = true;
  /// Concentration threshold; <= 0 selects 0.1 * E(u0).
  double threshold = 0.0;
  /// Radius schedule; empty selects {8h, 4h, 2h}.
  std::vector<double> radii;
  /// Number of final stages forming the tail; <= 0 selects half the stages
  /// (at least 1).
  int tail = 0;
  RunOptions run;
};

/// Carries the stages completed before a stage failed.
class ContinuationFailure : public ContinuationAborted {
 public:
  ContinuationFailure(const std::string& what, ContinuationResult partial)
      : ContinuationAborted(what),
        partial_(std::make_shared<ContinuationResult>(std::move(partial))) {}
  const ContinuationResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<ContinuationResult> partial_;
};

/// Runs the flow for each alpha in a strictly decreasing schedule (entries
/// > 1, optionally a final 1 evaluated without flowing), warm-started from
/// the previous stage unless disabled. Throws ConfigError for a bad
/// schedule and ContinuationFailure when a stage fails.
ContinuationResult alpha_continuation(const TargetManifold& N, const FlowConfig& cfg,
                                      const std::vector<double>& schedule, const MapField& u0,
                                      const TwistedSpinorField* psi0,
                                      const ContinuationOptions& opts = {});

}  // namespace dhflow::flow
