#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace psmas {

struct AgentProfile {
  std::string id;
  double latency_s = 1.0;         // expected inference latency, seconds
  std::int64_t cost_tokens = 0;   // expected token cost of one call
  std::int64_t response_tokens = 0;

  bool operator==(const AgentProfile&) const = default;
};

using AgentIndex = std::size_t;

/// A directed edge by agent index: `from` must complete before `to` starts.
struct Edge {
  AgentIndex from = 0;
  AgentIndex to = 0;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

using EdgeIds = std::pair<std::string, std::string>;

/// Validated dependency DAG over agents. Immutable after construction.
class DependencyGraph {
 public:
  /// Throws psmas::Error with UnknownAgentId, DuplicateAgentId, DuplicateEdge,
  /// SelfEdge, CycleDetected, or InvalidInput (bad latency / token counts).
  static DependencyGraph build(std::vector<AgentProfile> agents, const std::vector<EdgeIds>& edges);

  std::size_t size() const noexcept { return agents_.size(); }
  const std::vector<AgentProfile>& agents() const noexcept { return agents_; }
  const AgentProfile& agent(AgentIndex i) const { return agents_.at(i); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Topological order as agent indices; ties broken by ascending id.
  const std::vector<AgentIndex>& topo_order() const noexcept { return topo_; }
  /// Inverse of topo_order(): position of each agent in the order.
  const std::vector<std::size_t>& topo_position() const noexcept { return topo_pos_; }

  std::optional<AgentIndex> find(std::string_view id) const;
  AgentIndex index_of(std::string_view id) const;  // throws UnknownAgentId
  bool has_edge(AgentIndex from, AgentIndex to) const;

  double max_latency() const;
  double total_latency() const;
  double mean_response_tokens() const;

  bool operator==(const DependencyGraph&) const = default;

 private:
  DependencyGraph() = default;

  std::vector<AgentProfile> agents_;
  std::vector<Edge> edges_;
  std::vector<AgentIndex> topo_;
  std::vector<std::size_t> topo_pos_;
};

/// Agent ids in topological order.
std::vector<std::string> topological_order(const DependencyGraph& g);

enum class GraphShape { LinearChain, TwoBranchMerge, ForkDag };

std::string_view to_string(GraphShape shape) noexcept;
GraphShape parse_graph_shape(std::string_view name);

/// Benchmark topologies, reproduced topologically. Agents are named A1..An.
///
///   linear_chain(n >= 1):     A1 -> A2 -> ... -> An                 (n-1 edges)
///   two_branch_merge(n >= 4): A1 -> {A2, A3} -> A4, skip edge A1 -> A4,
///                             A4 -> A5..An as sinks                 (n+1 edges)
///   fork_dag(n >= 3):         chain A1..An plus forward forks Ak -> Ak+2
///                             for odd k                             (n-1 + (n-1)/2 edges)
DependencyGraph generate_benchmark_graph(GraphShape shape, std::size_t n, double latency_s,
                                         std::int64_t tokens, std::int64_t response_tokens = 0);

}  // namespace psmas
