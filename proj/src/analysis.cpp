#include "psmas/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "psmas/error.hpp"
#include "psmas/rng.hpp"

namespace psmas::analysis {

bool EdgeViolationStat::within(double k) const {
  return std::fabs(empirical_rate - analytic_bound) <= k * stderr_rate;
}

std::vector<EdgeViolationStat> monte_carlo_violation_rate(const DependencyGraph& g, const PhaseMap& phases,
                                                          double omega, double sigma_ratio, std::size_t trials,
                                                          std::uint64_t seed) {
  if (trials < 1000) throw Error(ErrorCode::OutOfRange, "Monte Carlo needs at least 1000 trials");
  if (!(sigma_ratio >= 0.0)) throw Error(ErrorCode::OutOfRange, "sigma_ratio must be >= 0");
  const double sigma = sigma_ratio * g.max_latency();

  std::vector<EdgeViolationStat> stats;
  stats.reserve(g.edges().size());
  for (const Edge& e : g.edges()) {
    EdgeViolationStat s;
    s.edge = e;
    s.slack_s = phase_slack(g, phases, omega, e);
    s.analytic_bound = sigma > 0.0 ? violation_probability_bound(s.slack_s, sigma) : (s.slack_s < 0.0 ? 1.0 : 0.0);
    s.trials = trials;
    stats.push_back(s);
  }

  std::vector<std::size_t> hits(stats.size(), 0);
  std::vector<double> xi(g.size(), 0.0);
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    if (sigma > 0.0) {
      for (double& x : xi) x = sigma * rng.normal();
    }
    for (std::size_t k = 0; k < stats.size(); ++k) {
      if (xi[stats[k].edge.from] > stats[k].slack_s) ++hits[k];
    }
  }
  for (std::size_t k = 0; k < stats.size(); ++k) {
    auto& s = stats[k];
    s.empirical_rate = static_cast<double>(hits[k]) / static_cast<double>(trials);
    s.stderr_rate = std::sqrt(s.empirical_rate * (1.0 - s.empirical_rate) / static_cast<double>(trials));
  }
  return stats;
}

void ScanGrid::validate() const {
  if (epsilons.empty() || omega_ratios.empty()) throw Error(ErrorCode::OutOfRange, "scan axes must be nonempty");
  if (trials_per_point == 0) throw Error(ErrorCode::OutOfRange, "trials_per_point must be >= 1");
  for (double r : omega_ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::NonPositiveOmega, "omega ratios must be > 0");
  }
}

namespace {

/// Runs `body(i)` for i in [0, count) on up to `workers` threads. Each index
/// writes only its own output slot, so scheduling order does not matter.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

ScanRow scan_point(const DependencyGraph& g, const PhaseMap& phases, const ScanGrid& grid, const SimConfig& tmpl,
                   double omega_max_value, std::size_t index) {
  ScanRow row;
  row.epsilon = grid.epsilons[index / grid.omega_ratios.size()];
  row.omega_ratio = grid.omega_ratios[index % grid.omega_ratios.size()];
  try {
    row.f = activation_fraction(row.epsilon);
    row.rho_theory = reduction_ratio(row.epsilon, grid.alpha);
    if (row.epsilon <= kRegimeMaxEpsilon) row.regime = classify_regime(row.epsilon, row.omega_ratio);

    SimConfig cfg = tmpl;
    cfg.epsilon = row.epsilon;
    cfg.alpha = grid.alpha;
    cfg.omega = row.omega_ratio * omega_max_value;

    std::size_t violations = 0;
    double edge_cycles = 0.0;
    for (std::size_t trial = 0; trial < grid.trials_per_point; ++trial) {
      cfg.seed = derive_seed(grid.master_seed, index * grid.trials_per_point + trial);
      cfg.record_details = trial == 0;
      const SimTrace trace = run_simulation(g, phases, cfg);
      violations += trace.violations.size();
      edge_cycles += static_cast<double>(trace.edges.size()) * trace.completed_cycles();
      if (trial == 0) {
        const CostParams quality;
        const CostReport analytic = token_totals(trace, AccountingMode::Analytic, quality);
        const CostReport event = token_totals(trace, AccountingMode::Event, quality);
        row.sim_token_fraction = analytic.cost_full > 0.0 ? analytic.cost_psmas / analytic.cost_full : 1.0;
        row.event_token_fraction = event.cost_full > 0.0 ? event.cost_psmas / event.cost_full : 1.0;
        row.scheduling_gain = analytic.scheduling_gain;
        row.compression_gain = analytic.compression_gain;
      }
    }
    row.violation_rate = edge_cycles > 0.0 ? static_cast<double>(violations) / edge_cycles : 0.0;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<ScanRow> sweep_field_scan(const DependencyGraph& g, const ScanGrid& grid, const SimConfig& sim_template,
                                      unsigned workers) {
  grid.validate();
  const PhaseMap phases = assign_phases(g, grid.scheme);
  const double wmax = omega_max(g, grid.scheme);
  std::vector<ScanRow> rows(grid.points());
  parallel_for(rows.size(), workers,
               [&](std::size_t i) { rows[i] = scan_point(g, phases, grid, sim_template, wmax, i); });
  return rows;
}

std::vector<AlphaRow> alpha_sweep(const DependencyGraph& g, const PhaseMap& phases, double epsilon,
                                  const std::vector<double>& alphas, const SimConfig& sim_template) {
  if (alphas.empty()) throw Error(ErrorCode::OutOfRange, "alpha list must be nonempty");
  std::vector<AlphaRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    SimConfig cfg = sim_template;
    cfg.epsilon = epsilon;
    cfg.alpha = alpha;
    cfg.convergence_threshold = 0.0;
    cfg.record_details = false;
    const SimTrace trace = run_simulation(g, phases, cfg);
    const CostReport r = token_totals(trace, AccountingMode::Analytic, CostParams{});
    rows.push_back({alpha, r.cost_full > 0.0 ? r.cost_psmas / r.cost_full : 1.0, r.scheduling_gain,
                    r.compression_gain});
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study(const std::vector<double>& epsilons, const std::vector<double>& alphas,
                                              int K, const DependencyGraph* g) {
  if (K < 1) throw Error(ErrorCode::OutOfRange, "K must be >= 1");
  const DependencyGraph fallback = DependencyGraph::build({{"A1", 1.0, 0, 0}}, {});
  const DependencyGraph& graph = g ? *g : fallback;
  const PhaseMap phases = assign_tpa(graph);

  std::vector<ConvergenceRow> rows;
  for (double eps : epsilons) {
    for (double alpha : alphas) {
      SimConfig cfg;
      cfg.epsilon = eps;
      cfg.alpha = alpha;
      cfg.omega = omega_max(graph, PhaseScheme::TPA);
      cfg.max_cycles = K;
      cfg.convergence_threshold = 0.0;
      cfg.record_details = false;
      const SimTrace trace = run_simulation(graph, phases, cfg);
      const ConvergenceCheck check = verify_convergence(trace, eps, alpha);
      rows.push_back({eps, alpha, check.factor, trace.divergence_curve.back(), check.pass});
    }
  }
  return rows;
}

namespace {

double violation_rate(const SimTrace& trace) {
  const double denom = static_cast<double>(trace.edges.size()) * trace.completed_cycles();
  return denom > 0.0 ? static_cast<double>(trace.violations.size()) / denom : 0.0;
}

}  // namespace

F1Report probe_phase_misalignment(const DependencyGraph& g, const PhaseMap& phases, std::size_t hidden,
                                  const ProbeSettings& settings) {
  const auto& edges = g.edges();
  if (hidden > edges.size()) throw Error(ErrorCode::OutOfRange, "cannot hide more edges than the graph has");

  SimConfig cfg;
  cfg.epsilon = std::min(kTwoPi / static_cast<double>(g.size()), kTwoPi);
  cfg.omega = settings.omega_ratio * omega_max(g, phases.scheme);
  cfg.sigma_ratio = settings.sigma_ratio;
  cfg.max_cycles = settings.cycles;
  cfg.convergence_threshold = 0.0;
  cfg.seed = settings.seed;
  cfg.record_details = false;

  F1Report report;
  report.hidden_edges = hidden;

  cfg.enforced_edges = edges;
  report.intact_rate = violation_rate(run_simulation(g, phases, cfg));

  cfg.enforced_edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(hidden), edges.end());
  report.probe_rate = violation_rate(run_simulation(g, phases, cfg));

  cfg.enforced_edges.clear();
  report.unchecked_rate = violation_rate(run_simulation(g, phases, cfg));

  report.delta = report.probe_rate - report.intact_rate;
  return report;
}

F2Report probe_velocity_overshoot(const DependencyGraph& g, const PhaseMap& phases,
                                  const std::vector<double>& omega_ratios, const ProbeSettings& settings) {
  if (omega_ratios.empty()) throw Error(ErrorCode::OutOfRange, "omega ratio list must be nonempty");
  F2Report report;
  const double wmax = omega_max(g, phases.scheme);
  for (std::size_t k = 0; k < omega_ratios.size(); ++k) {
    const auto stats = monte_carlo_violation_rate(g, phases, omega_ratios[k] * wmax, settings.sigma_ratio,
                                                  settings.trials, derive_seed(settings.seed, k));
    F2Point p{omega_ratios[k], 0.0, 0.0};
    for (const auto& s : stats) {
      p.empirical_rate += s.empirical_rate;
      p.analytic_rate += s.analytic_bound;
    }
    if (!stats.empty()) {
      p.empirical_rate /= static_cast<double>(stats.size());
      p.analytic_rate /= static_cast<double>(stats.size());
    }
    report.points.push_back(p);
  }
  for (std::size_t k = 0; k + 1 < report.points.size(); ++k) {
    const double lo = report.points[k].empirical_rate;
    const double hi = report.points[k + 1].empirical_rate;
    if ((lo == 0.0 && hi > 0.0) || (lo > 0.0 && hi > kCliffRatio * lo)) report.cliffs.push_back(k);
  }
  return report;
}

}  // namespace psmas::analysis
