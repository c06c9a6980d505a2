#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "psmas/graph.hpp"

namespace psmas {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Absolute tolerance for angle and time comparisons near window edges.
inline constexpr double kAngleTolerance = 1e-9;

enum class PhaseScheme { TPA, WPA };

std::string_view to_string(PhaseScheme scheme) noexcept;
PhaseScheme parse_phase_scheme(std::string_view name);  // case-insensitive "tpa" / "wpa"

/// Phase of each agent on the circle, indexed like DependencyGraph::agents().
struct PhaseMap {
  PhaseScheme scheme = PhaseScheme::TPA;
  std::vector<double> phases;  // radians in [0, 2pi)

  double operator[](AgentIndex i) const { return phases.at(i); }
  bool operator==(const PhaseMap&) const = default;
};

/// Reduce any finite angle into [0, 2pi).
double wrap_angle(double a);

/// Bi-invariant distance on the circle, in [0, pi]. Throws NonFiniteInput.
double circular_distance(double a, double b);

/// Angle swept travelling counterclockwise from `from` to `to`, in [0, 2pi).
double forward_gap(double from, double to);

/// Uniform spacing along the topological order: k-th agent gets 2pi(k-1)/n.
PhaseMap assign_tpa(const DependencyGraph& g);

/// Latency-proportional spacing: an agent's phase is 2pi times the share of
/// total latency held by the agents before it in topological order.
PhaseMap assign_wpa(const DependencyGraph& g);

PhaseMap assign_phases(const DependencyGraph& g, PhaseScheme scheme);

/// Largest sweep velocity (rad/s) that keeps every edge ordered with zero noise.
///   TPA: 2pi / (n * T_max)      WPA: 2pi / sum(T)
double omega_max(const DependencyGraph& g, PhaseScheme scheme);

/// Time margin (s) between predecessor completion and successor activation:
/// forward_gap(theta_i, theta_j) / omega - T(A_i). Negative when over-speed.
/// Throws EdgeNotInGraph, NonPositiveOmega, PhaseMapMismatch.
double phase_slack(const DependencyGraph& g, const PhaseMap& phases, double omega, Edge edge);
double phase_slack(const DependencyGraph& g, const PhaseMap& phases, double omega,
                   std::string_view from_id, std::string_view to_id);

/// Throws PhaseMapMismatch unless `phases` has one valid angle per agent of `g`.
void check_phase_map(const DependencyGraph& g, const PhaseMap& phases);

}  // namespace psmas
