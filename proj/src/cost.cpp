#include "psmas/cost.hpp"

#include <cmath>

#include "psmas/error.hpp"
#include "psmas/phase.hpp"

namespace psmas {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, what);
}

void check_epsilon(double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= kTwoPi, "epsilon must lie in (0, 2pi]");
}

void check_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
}

}  // namespace

void CostParams::validate() const {
  require(std::isfinite(n) && n >= 0.0, "n must be >= 0");
  require(std::isfinite(L) && L >= 0.0, "L must be >= 0");
  require(std::isfinite(R_bar) && R_bar >= 0.0, "R_bar must be >= 0");
  check_alpha(alpha);
  check_epsilon(epsilon);
  require(std::isfinite(Q_min) && Q_min > 0.0 && Q_min <= 1.0, "Q_min must lie in (0, 1]");
  require(std::isfinite(delta_Q) && delta_Q >= 0.0, "delta_Q must be >= 0");
  require(std::isfinite(C_Q) && C_Q >= 0.0, "C_Q must be >= 0");
  require(std::isfinite(L_bar) && L_bar >= 0.0, "L_bar must be >= 0");
}

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Efficient: return "Efficient";
    case Regime::OverCompressed: return "OverCompressed";
    case Regime::OverActivated: return "OverActivated";
    case Regime::VelocityFailure: return "VelocityFailure";
  }
  return "Unknown";
}

double activation_fraction(double epsilon) {
  check_epsilon(epsilon);
  return epsilon / kTwoPi;
}

double cost_full(double n, double L, double R_bar) { return n * L + n * R_bar; }

double cost_psmas(const CostParams& p) {
  p.validate();
  const double f = activation_fraction(p.epsilon);
  return p.n * p.L * (f + (1.0 - f) * p.alpha) + f * p.n * p.R_bar;
}

double reduction_ratio(double epsilon, double alpha) {
  check_epsilon(epsilon);
  check_alpha(alpha);
  return (1.0 - alpha) * (1.0 - epsilon / kTwoPi);
}

GainSplit decompose_totals(double full, double psmas_uncompressed, double psmas) {
  if (full <= 0.0) return {};
  return {(full - psmas_uncompressed) / full, (psmas_uncompressed - psmas) / full};
}

GainSplit decompose_gains(const CostParams& p) {
  p.validate();
  CostParams uncompressed = p;
  uncompressed.alpha = 1.0;
  return decompose_totals(cost_full(p.n, p.L, p.R_bar), cost_psmas(uncompressed), cost_psmas(p));
}

double optimal_epsilon(double Q_min, double delta_Q, double alpha, double L_bar) {
  const double denom = (1.0 - alpha) * L_bar;
  const double pressure = Q_min * delta_Q;
  if (!std::isfinite(denom) || !std::isfinite(pressure) || denom <= pressure) {
    throw Error(ErrorCode::DegenerateDenominator, "(1 - alpha) L_bar must exceed Q_min delta_Q");
  }
  return kTwoPi / (1.0 - pressure / denom);
}

double quality_bound(double C_Q, double epsilon, double alpha) {
  require(std::isfinite(C_Q) && C_Q >= 0.0, "C_Q must be >= 0");
  check_alpha(alpha);
  return C_Q * (1.0 - activation_fraction(epsilon)) * (1.0 - alpha);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double violation_probability_bound(double slack_s, double sigma_s) {
  if (!(sigma_s > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be > 0");
  if (!std::isfinite(slack_s)) throw Error(ErrorCode::NonFiniteInput, "slack is not finite");
  // 1 - Phi(z) == Phi(-z), which keeps full relative accuracy in the upper tail.
  return normal_cdf(-slack_s / sigma_s);
}

double expected_violations(double per_edge_bound, double edge_count, double cycles) {
  require(per_edge_bound >= 0.0 && edge_count >= 0.0 && cycles >= 0.0, "inputs must be nonnegative");
  return per_edge_bound * edge_count * cycles;
}

Regime classify_regime(double epsilon, double omega_ratio) {
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= kRegimeMaxEpsilon, "epsilon must lie in (0, 2.2]");
  require(std::isfinite(omega_ratio) && omega_ratio >= 0.0, "omega_ratio must be >= 0");
  if (omega_ratio > 0.9) return Regime::VelocityFailure;
  if (epsilon < 0.3) return Regime::OverCompressed;
  if (epsilon > 1.5) return Regime::OverActivated;
  if (epsilon <= 0.9 && omega_ratio <= 0.88) return Regime::Efficient;
  return Regime::OverActivated;
}

double convergence_factor(double epsilon, double alpha) {
  check_alpha(alpha);
  const double f = activation_fraction(epsilon);
  return f * alpha + (1.0 - f);
}

CostReport make_cost_report(const CostParams& p, std::optional<double> omega_ratio) {
  p.validate();
  CostReport r;
  r.f = activation_fraction(p.epsilon);
  r.rho = reduction_ratio(p.epsilon, p.alpha);
  r.cost_full = cost_full(p.n, p.L, p.R_bar);
  r.cost_psmas = cost_psmas(p);
  const GainSplit gains = decompose_gains(p);
  r.scheduling_gain = gains.scheduling;
  r.compression_gain = gains.compression;
  try {
    r.epsilon_star = optimal_epsilon(p.Q_min, p.delta_Q, p.alpha, p.L_bar);
  } catch (const Error&) {
    r.epsilon_star.reset();
  }
  r.quality_bound = quality_bound(p.C_Q, p.epsilon, p.alpha);
  if (omega_ratio && p.epsilon <= kRegimeMaxEpsilon) r.regime = classify_regime(p.epsilon, *omega_ratio);
  return r;
}

}  // namespace psmas
