#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace psmas {

/// Inputs of the closed-form token and quality model.
///
/// `alpha` is the idle-agent summary length as a fraction of the full context;
/// it lives in (0, 1]. The "no summaries at all" delivery mode is not alpha = 0,
/// it is a separate engine setting (see DeliveryMode in engine.hpp).
struct CostParams {
  double n = 1.0;        // agent count
  double L = 0.0;        // context length, tokens
  double R_bar = 0.0;    // mean response length, tokens
  double alpha = 1.0;    // compression ratio, (0, 1]
  double epsilon = 0.0;  // activation window, (0, 2pi]
  double Q_min = 1.0;    // quality floor, (0, 1]
  double delta_Q = 0.0;  // marginal quality cost per unit of missing context
  double C_Q = 0.0;      // quality sensitivity constant
  double L_bar = 0.0;    // mean context length for the optimal-window formula

  /// Throws OutOfRange naming the first offending field.
  void validate() const;
};

enum class Regime { Efficient, OverCompressed, OverActivated, VelocityFailure };

std::string_view to_string(Regime r) noexcept;

/// f(eps) = eps / 2pi. Throws OutOfRange outside (0, 2pi].
double activation_fraction(double epsilon);

/// n L + n R_bar.
double cost_full(double n, double L, double R_bar);

/// n L [f + (1 - f) alpha] + f n R_bar.
double cost_psmas(const CostParams& p);

/// Context-only reduction (1 - alpha)(1 - eps / 2pi). Excludes response tokens,
/// so it matches 1 - cost_psmas / cost_full only when R_bar = 0.
double reduction_ratio(double epsilon, double alpha);

struct GainSplit {
  double scheduling = 0.0;   // share of cost_full removed by gating alone (alpha held at 1)
  double compression = 0.0;  // further share removed by shrinking idle context to alpha L
  double total() const { return scheduling + compression; }
};

/// Splits the total reduction through the alpha = 1 intermediate. The
/// scheduling term does not read alpha at all.
GainSplit decompose_gains(const CostParams& p);

/// Same split from already-accumulated totals (used for multi-cycle ledgers).
GainSplit decompose_totals(double full, double psmas_uncompressed, double psmas);

/// 2pi (1 - Q_min delta_Q / ((1 - alpha) L_bar))^-1, evaluated as written.
/// Throws DegenerateDenominator when (1 - alpha) L_bar <= Q_min delta_Q.
double optimal_epsilon(double Q_min, double delta_Q, double alpha, double L_bar);

/// C_Q (1 - f(eps)) (1 - alpha).
double quality_bound(double C_Q, double epsilon, double alpha);

/// Standard normal CDF.
double normal_cdf(double z);

/// 1 - Phi(slack / sigma). Throws NonPositiveSigma.
double violation_probability_bound(double slack_s, double sigma_s);

/// per_edge_bound * |E| * K.
double expected_violations(double per_edge_bound, double edge_count, double cycles);

/// Operating regime of an (eps, omega / omega_max) point. Rules
/// apply in order: omega_ratio > 0.9 -> VelocityFailure; eps < 0.3 ->
/// OverCompressed; eps > 1.5 -> OverActivated; eps <= 0.9 and omega_ratio <=
/// 0.88 -> Efficient; everything else -> OverActivated.
/// Throws OutOfRange for eps outside (0, 2.2] or negative omega_ratio.
Regime classify_regime(double epsilon, double omega_ratio);

inline constexpr double kRegimeMaxEpsilon = 2.2;

/// f alpha + (1 - f): per-cycle contraction of divergence from the
/// full-activation context.
double convergence_factor(double epsilon, double alpha);

/// Closed-form summary of one configuration.
struct CostReport {
  double rho = 0.0;
  double f = 0.0;
  double cost_full = 0.0;
  double cost_psmas = 0.0;
  double scheduling_gain = 0.0;
  double compression_gain = 0.0;
  std::optional<double> epsilon_star;  // absent when the formula degenerates
  double quality_bound = 0.0;
  std::optional<Regime> regime;        // absent when eps is outside the regime map
};

/// Evaluates every closed-form quantity for `p`. `omega_ratio` feeds the
/// regime classifier; pass nullopt to leave the regime empty.
CostReport make_cost_report(const CostParams& p, std::optional<double> omega_ratio);

}  // namespace psmas
