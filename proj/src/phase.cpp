#include "psmas/phase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "psmas/error.hpp"

namespace psmas {

std::string_view to_string(PhaseScheme scheme) noexcept {
  return scheme == PhaseScheme::TPA ? "TPA" : "WPA";
}

PhaseScheme parse_phase_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "tpa") return PhaseScheme::TPA;
  if (lower == "wpa") return PhaseScheme::WPA;
  throw Error(ErrorCode::InvalidInput, "unknown phase scheme '" + std::string(name) + "'");
}

double wrap_angle(double a) {
  if (!std::isfinite(a)) throw Error(ErrorCode::NonFiniteInput, "angle is not finite");
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can land exactly on 2pi after the shift.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circular_distance(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::NonFiniteInput, "angle is not finite");
  const double d = std::fmod(std::fabs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

double forward_gap(double from, double to) { return wrap_angle(to - from); }

PhaseMap assign_tpa(const DependencyGraph& g) {
  PhaseMap map{PhaseScheme::TPA, std::vector<double>(g.size(), 0.0)};
  const double n = static_cast<double>(g.size());
  const auto& order = g.topo_order();
  for (std::size_t k = 0; k < order.size(); ++k) {
    map.phases[order[k]] = kTwoPi * static_cast<double>(k) / n;
  }
  return map;
}

namespace {

bool uniform_latency(const DependencyGraph& g) {
  const auto& a = g.agents();
  return std::all_of(a.begin(), a.end(), [&](const AgentProfile& p) { return p.latency_s == a.front().latency_s; });
}

}  // namespace

PhaseMap assign_wpa(const DependencyGraph& g) {
  if (g.size() == 0) return {PhaseScheme::WPA, {}};
  // Equal weights reduce to uniform spacing; use that formula so the two
  // schemes agree bit-for-bit.
  if (uniform_latency(g)) {
    PhaseMap map = assign_tpa(g);
    map.scheme = PhaseScheme::WPA;
    return map;
  }
  PhaseMap map{PhaseScheme::WPA, std::vector<double>(g.size(), 0.0)};
  const double total = g.total_latency();
  double prefix = 0.0;
  for (AgentIndex i : g.topo_order()) {
    map.phases[i] = kTwoPi * (prefix / total);
    prefix += g.agent(i).latency_s;
  }
  return map;
}

PhaseMap assign_phases(const DependencyGraph& g, PhaseScheme scheme) {
  return scheme == PhaseScheme::TPA ? assign_tpa(g) : assign_wpa(g);
}

double omega_max(const DependencyGraph& g, PhaseScheme scheme) {
  if (g.size() == 0) throw Error(ErrorCode::InvalidInput, "omega_max of an empty graph");
  const double bound = static_cast<double>(g.size()) * g.max_latency();
  if (scheme == PhaseScheme::TPA) return kTwoPi / bound;
  // sum(T) <= n * T_max holds exactly; clamp away rounding so WPA never
  // reports a slower bound than TPA.
  const double total = uniform_latency(g) ? bound : std::min(g.total_latency(), bound);
  return kTwoPi / total;
}

void check_phase_map(const DependencyGraph& g, const PhaseMap& phases) {
  if (phases.phases.size() != g.size()) {
    throw Error(ErrorCode::PhaseMapMismatch, "phase map has " + std::to_string(phases.phases.size()) +
                                                 " entries for " + std::to_string(g.size()) + " agents");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = phases.phases[i];
    if (!std::isfinite(p) || p < 0.0 || p >= kTwoPi) {
      throw Error(ErrorCode::PhaseMapMismatch, "phase of '" + g.agent(i).id + "' outside [0, 2pi)");
    }
  }
}

double phase_slack(const DependencyGraph& g, const PhaseMap& phases, double omega, Edge edge) {
  check_phase_map(g, phases);
  if (!(omega > 0.0) || !std::isfinite(omega)) throw Error(ErrorCode::NonPositiveOmega, "omega must be > 0");
  if (edge.from >= g.size() || edge.to >= g.size() || !g.has_edge(edge.from, edge.to)) {
    throw Error(ErrorCode::EdgeNotInGraph, "edge is not part of the dependency graph");
  }
  const double gap = forward_gap(phases[edge.from], phases[edge.to]);
  return gap / omega - g.agent(edge.from).latency_s;
}

double phase_slack(const DependencyGraph& g, const PhaseMap& phases, double omega, std::string_view from_id,
                   std::string_view to_id) {
  auto from = g.find(from_id);
  auto to = g.find(to_id);
  if (!from || !to) {
    throw Error(ErrorCode::EdgeNotInGraph, "edge " + std::string(from_id) + "->" + std::string(to_id) +
                                               " is not part of the dependency graph");
  }
  return phase_slack(g, phases, omega, Edge{*from, *to});
}

}  // namespace psmas
