#include "psmas/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "psmas/error.hpp"
#include "psmas/rng.hpp"

namespace psmas {

namespace {

constexpr double kTimeTolerance = 1e-9;
constexpr std::uint64_t kMaxSteps = 200'000'000;
// The PI update can drive omega through zero; keep the sweep moving.
constexpr double kOmegaFloorFraction = 1e-3;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, what);
}

}  // namespace

std::string_view to_string(DeliveryMode m) noexcept {
  return m == DeliveryMode::Summaries ? "summaries" : "none";
}

std::string_view to_string(AccountingMode m) noexcept {
  return m == AccountingMode::Analytic ? "analytic" : "event";
}

AccountingMode parse_accounting_mode(std::string_view name) {
  if (name == "analytic") return AccountingMode::Analytic;
  if (name == "event") return AccountingMode::Event;
  throw Error(ErrorCode::InvalidInput, "unknown accounting mode '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= kTwoPi, "epsilon must lie in (0, 2pi]");
  if (!std::isfinite(omega) || omega <= 0.0) throw Error(ErrorCode::NonPositiveOmega, "omega must be > 0");
  require(std::isfinite(dt) && dt >= 0.0, "dt must be >= 0 (0 = auto)");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(std::isfinite(sigma_ratio) && sigma_ratio >= 0.0, "sigma_ratio must be >= 0");
  require(max_cycles >= 1, "max_cycles must be >= 1");
  require(std::isfinite(Kp) && std::isfinite(Ki), "controller gains must be finite");
  require(std::isfinite(convergence_threshold) && convergence_threshold >= 0.0 && convergence_threshold < 1.0,
          "convergence_threshold must lie in [0, 1)");
  require(std::isfinite(initial_context_tokens) && initial_context_tokens >= 0.0,
          "initial_context_tokens must be >= 0");
}

double SimConfig::resolved_dt(std::size_t n) const {
  if (dt > 0.0) return dt;
  const double spacing = kTwoPi / static_cast<double>(std::max<std::size_t>(n, 1));
  return std::min(epsilon, spacing) / (4.0 * omega);
}

ControllerState pi_controller_step(ControllerState state, double observed_latency_s, double T_max, double Kp,
                                   double Ki) {
  if (!(T_max > 0.0)) throw Error(ErrorCode::OutOfRange, "T_max must be > 0");
  const double e = observed_latency_s / T_max - 1.0;
  state.error_integral += e;
  state.omega = state.omega - Kp * e - Ki * state.error_integral;
  return state;
}

std::vector<std::size_t> SimTrace::violations_per_edge() const {
  std::vector<std::size_t> counts(edges.size(), 0);
  for (const auto& v : violations) {
    auto it = std::find(edges.begin(), edges.end(), v.edge);
    if (it != edges.end()) ++counts[static_cast<std::size_t>(it - edges.begin())];
  }
  return counts;
}

std::vector<ViolationRecord> detect_violations(const std::vector<Invocation>& invocations,
                                               const std::vector<Edge>& edges, int completed_cycles) {
  std::map<std::pair<AgentIndex, int>, const Invocation*> by_slot;
  for (const auto& inv : invocations) {
    if (inv.cycle < completed_cycles) by_slot[{inv.agent, inv.cycle}] = &inv;
  }
  std::vector<ViolationRecord> out;
  for (int c = 0; c < completed_cycles; ++c) {
    for (const Edge& e : edges) {
      auto pred = by_slot.find({e.from, c});
      auto succ = by_slot.find({e.to, c});
      if (pred == by_slot.end() || succ == by_slot.end()) continue;
      const double lateness = pred->second->end_t() - succ->second->start_t;
      if (lateness > kTimeTolerance) out.push_back({e, c, lateness});
    }
  }
  return out;
}

namespace {

/// Mutable state of one run. Kept in one place so the loop body stays readable.
class Sweep {
 public:
  Sweep(const DependencyGraph& g, const PhaseMap& phases, const SimConfig& cfg)
      : g_(g), theta_(phases.phases), cfg_(cfg), rng_(cfg.seed), n_(g.size()) {
    half_window_ = cfg.epsilon / 2.0;
    phi0_ = *std::min_element(theta_.begin(), theta_.end()) - half_window_;
    dt_ = cfg.resolved_dt(n_);
    t_max_ = g.max_latency();
    sigma_ = cfg.sigma_ratio * t_max_;
    factor_ = convergence_factor(cfg.epsilon, cfg.alpha);
    omega_floor_ = cfg.omega * kOmegaFloorFraction;
    omega_ = cfg.omega;
    controller_ = {cfg.omega, 0.0};
    seg_phi_ = phi0_;
    next_lap_.assign(n_, 0);
    last_lap_.assign(n_, -1);
    last_end_.assign(n_, 0.0);
    refresh_summaries_ = cfg.delivery == DeliveryMode::Summaries && cfg.epsilon < kTwoPi;

    trace_.config = cfg;
    trace_.resolved_dt = dt_;
    trace_.t_max = t_max_;
    trace_.mean_response_tokens = g.mean_response_tokens();
    trace_.edges = g.edges();
    for (const auto& a : g.agents()) trace_.agent_ids.push_back(a.id);
    trace_.final_context = {cfg.initial_context_tokens, 1.0, std::vector<SummaryCacheEntry>(n_)};
    trace_.divergence_curve.push_back(1.0);
    open_cycle(0.0);
  }

  SimTrace run() {
    for (std::uint64_t step = 0;; ++step) {
      if (step > kMaxSteps) throw Error(ErrorCode::OutOfRange, "step budget exhausted; dt too small for the run");
      const double t = static_cast<double>(step) * dt_;
      if (!drain_events(t)) break;
      if (cfg_.record_details) record_step(t);
    }
    trace_.violations = detect_violations(trace_.invocations, trace_.edges, trace_.completed_cycles());
    if (!cfg_.record_details) {
      trace_.invocations.clear();
      trace_.invocations.shrink_to_fit();
      trace_.refreshes.clear();
    }
    return std::move(trace_);
  }

 private:
  double entry_angle(AgentIndex i) const {
    return theta_[i] - half_window_ + kTwoPi * static_cast<double>(next_lap_[i]);
  }
  double angle_at(double t) const { return seg_phi_ + omega_ * (t - seg_t_); }
  double time_at(double angle) const { return seg_t_ + (angle - seg_phi_) / omega_; }

  /// Processes every window opening up to time t, in opening order with ties
  /// by id. Returns false once the run has finished.
  bool drain_events(double t) {
    for (;;) {
      const double phi_now = angle_at(t);
      std::optional<AgentIndex> due;
      for (AgentIndex i = 0; i < n_; ++i) {
        const double a = entry_angle(i);
        if (a > phi_now) continue;
        if (!due || a < entry_angle(*due) || (a == entry_angle(*due) && g_.agent(i).id < g_.agent(*due).id)) {
          due = i;
        }
      }
      if (!due) return true;
      if (next_lap_[*due] > cycle_) {
        if (!close_cycle()) return false;
        continue;
      }
      invoke(*due, std::min(time_at(entry_angle(*due)), t));
    }
  }

  void invoke(AgentIndex i, double entry_t) {
    const int lap = next_lap_[i];
    double start = std::max(entry_t, 0.0);
    for (const Edge& e : cfg_.enforced_edges) {
      if (e.to == i && e.from < n_ && last_lap_[e.from] == lap) start = std::max(start, last_end_[e.from]);
    }
    const double nominal = g_.agent(i).latency_s;
    double duration = nominal;
    if (sigma_ > 0.0) duration += std::max(sigma_ * rng_.normal(), -0.99 * nominal);

    auto& ctx = trace_.final_context;
    const double response = static_cast<double>(g_.agent(i).response_tokens);
    trace_.invocations.push_back({i, lap, start, wrap_angle(angle_at(start)), duration, ctx.length_tokens, response});
    ctx.length_tokens += response;
    if (refresh_summaries_) {
      const double tokens = cfg_.alpha * ctx.length_tokens;
      ctx.summary_cache[i] = {tokens, lap};
      trace_.refreshes.push_back({i, lap, start, tokens});
    }
    cycle_max_latency_ = std::max(cycle_max_latency_, duration);
    last_lap_[i] = lap;
    last_end_[i] = start + duration;
    ++next_lap_[i];
  }

  void open_cycle(double start_t) {
    trace_.cycles.push_back({cycle_, start_t, trace_.final_context.length_tokens, omega_, 0.0, 0.0});
    cycle_max_latency_ = 0.0;
  }

  /// Finishes the current cycle at its boundary angle. Returns false when the
  /// run should stop.
  bool close_cycle() {
    const double boundary = phi0_ + kTwoPi * static_cast<double>(cycle_ + 1);
    const double boundary_t = time_at(boundary);

    auto& ctx = trace_.final_context;
    ctx.divergence *= factor_;
    CycleRecord& rec = trace_.cycles.back();
    rec.max_observed_latency_s = cycle_max_latency_;
    rec.divergence = ctx.divergence;
    trace_.divergence_curve.push_back(ctx.divergence);
    trace_.omega_curve.push_back(omega_);

    const int completed = cycle_ + 1;
    if (cfg_.convergence_threshold > 0.0 && ctx.divergence <= cfg_.convergence_threshold) {
      trace_.converged_at = completed;
      return false;
    }
    if (completed >= cfg_.max_cycles) return false;

    if (cfg_.controller_enabled) {
      controller_ = pi_controller_step(controller_, cycle_max_latency_, t_max_, cfg_.Kp, cfg_.Ki);
      controller_.omega = std::max(controller_.omega, omega_floor_);
      seg_t_ = boundary_t;
      seg_phi_ = boundary;
      omega_ = controller_.omega;
    }
    ++cycle_;
    open_cycle(boundary_t);
    return true;
  }

  void record_step(double t) {
    StepRecord rec{t, wrap_angle(angle_at(t)), {}};
    for (AgentIndex i = 0; i < n_; ++i) {
      if (circular_distance(theta_[i], rec.phi) < half_window_) rec.active.push_back(i);
    }
    trace_.steps.push_back(std::move(rec));
  }

  const DependencyGraph& g_;
  const std::vector<double>& theta_;
  const SimConfig& cfg_;
  Rng rng_;
  std::size_t n_;

  double half_window_ = 0.0;
  double phi0_ = 0.0;
  double dt_ = 0.0;
  double t_max_ = 0.0;
  double sigma_ = 0.0;
  double factor_ = 1.0;
  double omega_floor_ = 0.0;
  double omega_ = 0.0;
  ControllerState controller_;
  bool refresh_summaries_ = false;

  // phi(t) = seg_phi_ + omega_ (t - seg_t_) within the current velocity segment.
  double seg_t_ = 0.0;
  double seg_phi_ = 0.0;

  int cycle_ = 0;
  double cycle_max_latency_ = 0.0;
  std::vector<int> next_lap_;
  std::vector<int> last_lap_;
  std::vector<double> last_end_;

  SimTrace trace_;
};

}  // namespace

SimTrace run_simulation(const DependencyGraph& g, const PhaseMap& phases, const SimConfig& config) {
  config.validate();
  if (g.size() == 0) throw Error(ErrorCode::InvalidInput, "graph has no agents");
  check_phase_map(g, phases);
  for (const Edge& e : config.enforced_edges) {
    if (!g.has_edge(e.from, e.to)) throw Error(ErrorCode::EdgeNotInGraph, "enforced edge is not in the graph");
  }
  SimTrace trace = Sweep(g, phases, config).run();
  trace.omega_ratio = config.omega / omega_max(g, phases.scheme);
  return trace;
}

CostReport token_totals(const SimTrace& trace, AccountingMode mode, const CostParams& params) {
  const auto& cfg = trace.config;
  const double n = static_cast<double>(trace.agent_count());
  const double r_bar = trace.mean_response_tokens;
  const double f = activation_fraction(cfg.epsilon);
  const bool summaries = cfg.delivery == DeliveryMode::Summaries;

  double full = 0.0;
  double uncompressed = 0.0;
  double psmas_total = 0.0;

  if (mode == AccountingMode::Analytic) {
    for (const auto& c : trace.cycles) {
      CostParams p = params;
      p.n = n;
      p.L = c.start_context_tokens;
      p.R_bar = r_bar;
      p.epsilon = cfg.epsilon;
      p.alpha = 1.0;
      full += cost_full(n, p.L, r_bar);
      uncompressed += cost_psmas(p);
      if (summaries) {
        p.alpha = cfg.alpha;
        psmas_total += cost_psmas(p);
      } else {
        psmas_total += n * p.L * f + f * n * r_bar;
      }
    }
  } else {
    if (!cfg.record_details && trace.completed_cycles() > 0) {
      throw Error(ErrorCode::ModeMismatch, "event accounting needs a trace recorded with details");
    }
    const bool has_idle = cfg.epsilon < kTwoPi;
    double active = 0.0;
    double idle_full = 0.0;
    double idle_charged = 0.0;
    for (const auto& inv : trace.invocations) {
      if (inv.cycle >= trace.completed_cycles()) continue;
      active += inv.tokens_in + inv.tokens_out;
      if (has_idle) idle_full += inv.tokens_in + inv.tokens_out;
    }
    if (summaries) {
      for (const auto& r : trace.refreshes) {
        if (r.cycle < trace.completed_cycles()) idle_charged += r.tokens;
      }
    }
    full = active + idle_full;
    uncompressed = full;
    psmas_total = active + idle_charged;
  }

  CostReport report;
  report.f = f;
  report.rho = reduction_ratio(cfg.epsilon, cfg.alpha);
  report.cost_full = full;
  report.cost_psmas = psmas_total;
  const GainSplit gains = decompose_totals(full, uncompressed, psmas_total);
  report.scheduling_gain = gains.scheduling;
  report.compression_gain = gains.compression;
  try {
    report.epsilon_star = optimal_epsilon(params.Q_min, params.delta_Q, cfg.alpha, params.L_bar);
  } catch (const Error&) {
    report.epsilon_star.reset();
  }
  report.quality_bound = quality_bound(params.C_Q, cfg.epsilon, cfg.alpha);
  if (trace.omega_ratio && cfg.epsilon <= kRegimeMaxEpsilon) {
    report.regime = classify_regime(cfg.epsilon, *trace.omega_ratio);
  }
  return report;
}

ConvergenceCheck verify_convergence(const SimTrace& trace, double epsilon, double alpha) {
  ConvergenceCheck out;
  out.factor = convergence_factor(epsilon, alpha);
  out.pass = !trace.divergence_curve.empty();
  out.min_margin = std::numeric_limits<double>::infinity();
  if (!out.pass) return out;
  const double d0 = trace.divergence_curve.front();
  for (std::size_t k = 0; k < trace.divergence_curve.size(); ++k) {
    const double bound = std::pow(out.factor, static_cast<double>(k)) * d0;
    const double dk = trace.divergence_curve[k];
    if (dk > bound * (1.0 + 1e-9)) out.pass = false;
    if (bound > 0.0) out.min_margin = std::min(out.min_margin, (bound - dk) / bound);
  }
  return out;
}

}  // namespace psmas
