#pragma once

// Independent oracles and random generators shared by the test binaries.
// Nothing here calls into the library's numerics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "psmas/graph.hpp"

namespace psmas::testing {

inline constexpr double kPi = 3.14159265358979323846;

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-14) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Upper Gaussian tail 1 - Phi(z) by integrating the density.
inline double gaussian_tail_quadrature(double z) {
  const auto density = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); };
  const double half = integrate(density, 0.0, std::fabs(z));
  return z >= 0.0 ? 0.5 - half : 0.5 + half;
}

/// Smallest (by id sequence) permutation that respects every edge, or empty
/// when none does. Exhaustive; keep n <= 8.
inline std::vector<std::string> brute_force_topo(std::vector<std::string> ids,
                                                 const std::vector<EdgeIds>& edges) {
  std::sort(ids.begin(), ids.end());
  do {
    bool ok = true;
    for (const auto& [from, to] : edges) {
      const auto pf = std::find(ids.begin(), ids.end(), from);
      const auto pt = std::find(ids.begin(), ids.end(), to);
      if (pf > pt) {
        ok = false;
        break;
      }
    }
    if (ok) return ids;
  } while (std::next_permutation(ids.begin(), ids.end()));
  return {};
}

/// Directed cycle test by transitive closure (Floyd-Warshall on booleans).
inline bool has_cycle_by_reachability(const std::vector<std::string>& ids, const std::vector<EdgeIds>& edges) {
  const std::size_t n = ids.size();
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), s) - ids.begin());
  };
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) reach[idx(a)][idx(b)] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return true;
  return false;
}

struct RandomDag {
  std::vector<AgentProfile> agents;
  std::vector<EdgeIds> edges;
};

/// Random DAG: a hidden random order, forward edges with probability
/// `density`. Ids are shuffled relative to that order so tie-breaking matters.
inline RandomDag random_dag(std::mt19937_64& rng, std::size_t n, double density, bool uniform_latency,
                                  double latency = 2.0) {
  RandomDag dag;
  std::vector<std::size_t> labels(n);
  std::iota(labels.begin(), labels.end(), 1);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::uniform_real_distribution<double> lat(0.5, 4.0);
  std::uniform_int_distribution<int> tok(0, 2000);
  for (std::size_t k = 0; k < n; ++k) {
    dag.agents.push_back({"A" + std::to_string(labels[k]), uniform_latency ? latency : lat(rng), tok(rng),
                           tok(rng) / 4});
  }
  std::bernoulli_distribution coin(density);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) dag.edges.emplace_back(dag.agents[i].id, dag.agents[j].id);
  // Present agents in a scrambled order as well.
  std::shuffle(dag.agents.begin(), dag.agents.end(), rng);
  return dag;
}

inline DependencyGraph chain(std::size_t n, double latency = 2.0, std::int64_t response = 0) {
  std::vector<AgentProfile> agents;
  std::vector<EdgeIds> edges;
  for (std::size_t k = 1; k <= n; ++k) {
    agents.push_back({"A" + std::to_string(k), latency, 1000, response});
    if (k > 1) edges.emplace_back("A" + std::to_string(k - 1), "A" + std::to_string(k));
  }
  return DependencyGraph::build(agents, edges);
}

}  // namespace psmas::testing
