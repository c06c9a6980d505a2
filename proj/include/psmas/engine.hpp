#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmas/cost.hpp"
#include "psmas/graph.hpp"
#include "psmas/phase.hpp"

namespace psmas {

/// How idle agents receive context.
enum class DeliveryMode {
  Summaries,    // cached summary of length alpha * L, refreshed once per cycle
  NoSummaries,  // idle agents receive nothing
};

/// Which reading of the per-step cost formula a ledger follows.
enum class AccountingMode {
  Analytic,  // closed-form cost per cycle, context length frozen at cycle start
  Event,     // sum of per-invocation and per-refresh charges
};

std::string_view to_string(DeliveryMode m) noexcept;
std::string_view to_string(AccountingMode m) noexcept;
AccountingMode parse_accounting_mode(std::string_view name);

struct SimConfig {
  double epsilon = 0.5;  // activation window, radians, (0, 2pi]
  double omega = 1.0;    // sweep velocity, rad/s
  double dt = 0.0;       // step, seconds; 0 picks min(eps, 2pi/n) / (4 omega)
  double alpha = 0.12;   // compression ratio, (0, 1]
  DeliveryMode delivery = DeliveryMode::Summaries;
  double sigma_ratio = 0.0;  // latency noise sigma as a fraction of T_max
  int max_cycles = 10;
  std::uint64_t seed = 0;

  bool controller_enabled = false;
  double Kp = 0.2;
  double Ki = 0.05;

  /// Stop once divergence <= threshold * D0. Zero disables early stopping.
  double convergence_threshold = 0.01;
  AccountingMode accounting = AccountingMode::Analytic;

  double initial_context_tokens = 0.0;

  /// Per-step and per-invocation records. Large batch runs can turn these
  /// off; Event accounting then reports ModeMismatch.
  bool record_details = true;

  /// Ordering guard: a successor on one of these edges is held until its
  /// predecessor's current-cycle call has finished. Empty means the sweep runs
  /// open-loop, which is the default behaviour.
  std::vector<Edge> enforced_edges;

  /// Throws OutOfRange / NonPositiveOmega on invalid fields.
  void validate() const;
  /// The step actually used for a graph of `n` agents.
  double resolved_dt(std::size_t n) const;
};

struct ControllerState {
  double omega = 0.0;
  double error_integral = 0.0;
};

/// One PI update: e = observed / T_max - 1, integral += e,
/// omega' = omega - Kp e - Ki integral.
ControllerState pi_controller_step(ControllerState state, double observed_latency_s, double T_max,
                                   double Kp = 0.2, double Ki = 0.05);

struct StepRecord {
  double t = 0.0;
  double phi = 0.0;
  std::vector<AgentIndex> active;
};

struct Invocation {
  AgentIndex agent = 0;
  int cycle = 0;
  double start_t = 0.0;
  double phi = 0.0;  // sweep angle at start_t
  double duration_s = 0.0;
  double tokens_in = 0.0;   // full context delivered
  double tokens_out = 0.0;  // response appended to the context
  double end_t() const { return start_t + duration_s; }
};

struct SummaryRefresh {
  AgentIndex agent = 0;
  int cycle = 0;
  double t = 0.0;
  double tokens = 0.0;  // alpha * L at refresh time
};

struct ViolationRecord {
  Edge edge;
  int cycle = 0;
  double lateness_s = 0.0;  // predecessor end minus successor start
};

struct CycleRecord {
  int cycle = 0;
  double start_t = 0.0;
  double start_context_tokens = 0.0;
  double omega = 0.0;
  double max_observed_latency_s = 0.0;
  double divergence = 0.0;  // after this cycle's contraction
};

struct SummaryCacheEntry {
  double tokens = 0.0;
  int refreshed_at_cycle = -1;
};

struct ContextState {
  double length_tokens = 0.0;
  double divergence = 1.0;
  std::vector<SummaryCacheEntry> summary_cache;
};

struct SimTrace {
  SimConfig config;
  std::vector<std::string> agent_ids;
  std::vector<Edge> edges;
  double resolved_dt = 0.0;
  double t_max = 0.0;
  double mean_response_tokens = 0.0;
  std::optional<double> omega_ratio;  // omega / omega_max of the phase scheme

  std::vector<StepRecord> steps;
  std::vector<Invocation> invocations;
  std::vector<SummaryRefresh> refreshes;
  std::vector<ViolationRecord> violations;
  std::vector<CycleRecord> cycles;

  std::vector<double> divergence_curve;  // D0 followed by D after each completed cycle
  std::vector<double> omega_curve;       // sweep velocity used in each cycle
  std::optional<int> converged_at;       // completed-cycle count at convergence
  ContextState final_context;

  std::size_t agent_count() const { return agent_ids.size(); }
  int completed_cycles() const { return static_cast<int>(cycles.size()); }
  /// Violation count per graph edge, indexed like `edges`.
  std::vector<std::size_t> violations_per_edge() const;
};

/// Runs the sweep loop with mock agents. Throws PhaseMapMismatch,
/// NonPositiveOmega, OutOfRange.
///
/// The sweep starts on the leading edge of the lowest-phase agent's window,
/// so phi(t) = (theta_min - eps / 2 + integral of omega) mod 2pi and each
/// cycle is one full turn from that edge. Agents are invoked when their
/// window opens (once per cycle); calls start at the exact opening time, not
/// at the next step.
SimTrace run_simulation(const DependencyGraph& g, const PhaseMap& phases, const SimConfig& config);

/// Re-derives ordering violations from invocation timestamps alone.
std::vector<ViolationRecord> detect_violations(const std::vector<Invocation>& invocations,
                                               const std::vector<Edge>& edges, int completed_cycles);

/// Token ledger of a finished trace. Structural quantities (n, R_bar, eps,
/// alpha) come from the trace; `params` supplies the quality constants
/// (Q_min, delta_Q, C_Q, L_bar). Event mode needs recorded details.
CostReport token_totals(const SimTrace& trace, AccountingMode mode, const CostParams& params);

struct ConvergenceCheck {
  bool pass = false;
  double factor = 0.0;
  double min_margin = 0.0;  // min over k of (bound_k - D_k) / bound_k
};

/// Checks D_k <= factor^k * D0 * (1 + 1e-9) for every recorded cycle.
ConvergenceCheck verify_convergence(const SimTrace& trace, double epsilon, double alpha);

}  // namespace psmas
