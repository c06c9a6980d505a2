#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psmas/cost.hpp"
#include "psmas/engine.hpp"
#include "psmas/graph.hpp"
#include "psmas/phase.hpp"

namespace psmas::analysis {

// ---------------------------------------------------------------------------
// Monte Carlo ordering-violation study

struct EdgeViolationStat {
  Edge edge;
  double slack_s = 0.0;
  double empirical_rate = 0.0;
  double analytic_bound = 0.0;  // 1 - Phi(slack / sigma)
  double stderr_rate = 0.0;     // sqrt(p (1 - p) / trials)
  std::size_t trials = 0;

  /// |empirical - analytic| within `k` standard errors (k = 3 by default).
  bool within(double k = 3.0) const;
};

/// Samples one latency perturbation per agent per trial and counts, for each
/// edge, trials where the predecessor's perturbation exceeds the edge slack.
/// Requires trials >= 1000 (OutOfRange otherwise).
std::vector<EdgeViolationStat> monte_carlo_violation_rate(const DependencyGraph& g, const PhaseMap& phases,
                                                          double omega, double sigma_ratio, std::size_t trials,
                                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sweep-field scan over (eps, omega / omega_max)

struct ScanGrid {
  std::vector<double> epsilons;
  std::vector<double> omega_ratios;
  double alpha = 0.12;
  std::size_t trials_per_point = 1;
  std::uint64_t master_seed = 0;
  PhaseScheme scheme = PhaseScheme::TPA;

  void validate() const;
  std::size_t points() const { return epsilons.size() * omega_ratios.size(); }
};

struct ScanRow {
  double epsilon = 0.0;
  double omega_ratio = 0.0;
  double f = 0.0;
  double rho_theory = 0.0;
  double sim_token_fraction = 0.0;    // analytic ledger, cost_psmas / cost_full
  double event_token_fraction = 0.0;  // event ledger
  double scheduling_gain = 0.0;
  double compression_gain = 0.0;
  double violation_rate = 0.0;        // violations / (edges * cycles * trials)
  std::optional<Regime> regime;       // empty when eps is off the regime map
  std::string error;                  // nonempty when the point failed
};

/// One row per grid point, eps-major. Each point draws its seed from
/// (master_seed, point index), so results do not depend on `workers`.
std::vector<ScanRow> sweep_field_scan(const DependencyGraph& g, const ScanGrid& grid, const SimConfig& sim_template,
                                      unsigned workers = 1);

// ---------------------------------------------------------------------------
// Compression sweep at a fixed window

struct AlphaRow {
  double alpha = 0.0;
  double token_cost_fraction = 0.0;
  double scheduling_gain = 0.0;
  double compression_gain = 0.0;
};

/// Runs the template once per alpha with early stopping disabled, so every
/// row covers the same number of cycles.
std::vector<AlphaRow> alpha_sweep(const DependencyGraph& g, const PhaseMap& phases, double epsilon,
                                  const std::vector<double>& alphas, const SimConfig& sim_template);

// ---------------------------------------------------------------------------
// Divergence contraction

struct ConvergenceRow {
  double epsilon = 0.0;
  double alpha = 0.0;
  double factor = 0.0;
  double D_K = 0.0;
  bool bound_satisfied = false;
};

/// Simulates K cycles per (eps, alpha) pair. The divergence model does not
/// depend on the graph; a single-agent graph is used unless one is supplied.
std::vector<ConvergenceRow> convergence_study(const std::vector<double>& epsilons, const std::vector<double>& alphas,
                                              int K, const DependencyGraph* g = nullptr);

// ---------------------------------------------------------------------------
// Failure-mode probes

struct ProbeSettings {
  double sigma_ratio = 0.18;
  double omega_ratio = 0.85;    // F1 only
  int cycles = 2000;            // F1 simulation length
  std::size_t trials = 20000;   // F2 Monte Carlo trials per point
  std::uint64_t seed = 0;
};

/// F1 (misspecified graph): the scheduler guards only the edges it knows
/// about. Hiding edges from that set exposes them to the open-loop sweep.
struct F1Report {
  std::size_t hidden_edges = 0;
  double intact_rate = 0.0;     // every edge guarded
  double probe_rate = 0.0;      // hidden edges unguarded
  double unchecked_rate = 0.0;  // nothing guarded
  double delta = 0.0;           // probe_rate - intact_rate
};

/// Hides the first `hidden` edges in graph order. Rates count violations on
/// the true edge set per edge per cycle.
F1Report probe_phase_misalignment(const DependencyGraph& g, const PhaseMap& phases, std::size_t hidden,
                                  const ProbeSettings& settings);

/// F2 (velocity overshoot): violation rate versus omega / omega_max.
struct F2Point {
  double omega_ratio = 0.0;
  double empirical_rate = 0.0;  // mean over edges
  double analytic_rate = 0.0;
};

struct F2Report {
  std::vector<F2Point> points;
  /// Indices k where the rate grows more than 10x from point k to k + 1.
  std::vector<std::size_t> cliffs;
  bool cliff_detected() const { return !cliffs.empty(); }
};

inline constexpr double kCliffRatio = 10.0;

F2Report probe_velocity_overshoot(const DependencyGraph& g, const PhaseMap& phases,
                                  const std::vector<double>& omega_ratios, const ProbeSettings& settings);

}  // namespace psmas::analysis
