#include "psmas/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#include "psmas/error.hpp"

namespace psmas {

namespace {

void validate_agent(const AgentProfile& a) {
  if (a.id.empty()) throw Error(ErrorCode::InvalidInput, "agent id must be nonempty");
  if (!std::isfinite(a.latency_s) || a.latency_s <= 0.0) {
    throw Error(ErrorCode::InvalidInput, "agent '" + a.id + "': latency_s must be > 0");
  }
  if (a.cost_tokens < 0) throw Error(ErrorCode::InvalidInput, "agent '" + a.id + "': cost_tokens must be >= 0");
  if (a.response_tokens < 0) {
    throw Error(ErrorCode::InvalidInput, "agent '" + a.id + "': response_tokens must be >= 0");
  }
}

}  // namespace

DependencyGraph DependencyGraph::build(std::vector<AgentProfile> agents, const std::vector<EdgeIds>& edges) {
  DependencyGraph g;
  std::unordered_map<std::string, AgentIndex> by_id;
  by_id.reserve(agents.size());
  for (AgentIndex i = 0; i < agents.size(); ++i) {
    validate_agent(agents[i]);
    if (!by_id.emplace(agents[i].id, i).second) {
      throw Error(ErrorCode::DuplicateAgentId, "agent id '" + agents[i].id + "' listed twice");
    }
  }

  std::set<Edge> seen;
  g.edges_.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto f = by_id.find(from);
    if (f == by_id.end()) throw Error(ErrorCode::UnknownAgentId, "edge names unknown agent '" + from + "'");
    auto t = by_id.find(to);
    if (t == by_id.end()) throw Error(ErrorCode::UnknownAgentId, "edge names unknown agent '" + to + "'");
    if (f->second == t->second) throw Error(ErrorCode::SelfEdge, "self edge on '" + from + "'");
    Edge e{f->second, t->second};
    if (!seen.insert(e).second) throw Error(ErrorCode::DuplicateEdge, "edge " + from + "->" + to + " listed twice");
    g.edges_.push_back(e);
  }

  // Kahn's algorithm; the ready set is ordered by id so the result is unique.
  const std::size_t n = agents.size();
  std::vector<std::vector<AgentIndex>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const Edge& e : g.edges_) {
    succ[e.from].push_back(e.to);
    ++indegree[e.to];
  }
  auto by_id_greater = [&agents](AgentIndex a, AgentIndex b) { return agents[a].id > agents[b].id; };
  std::priority_queue<AgentIndex, std::vector<AgentIndex>, decltype(by_id_greater)> ready(by_id_greater);
  for (AgentIndex i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  g.topo_.reserve(n);
  while (!ready.empty()) {
    AgentIndex i = ready.top();
    ready.pop();
    g.topo_.push_back(i);
    for (AgentIndex j : succ[i]) {
      if (--indegree[j] == 0) ready.push(j);
    }
  }
  if (g.topo_.size() != n) {
    std::string members;
    for (AgentIndex i = 0; i < n; ++i) {
      if (indegree[i] > 0) members += (members.empty() ? "" : ",") + agents[i].id;
    }
    throw Error(ErrorCode::CycleDetected,
                "dependency cycle among {" + members + "}; cyclic graphs stall the sweep");
  }
  g.topo_pos_.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) g.topo_pos_[g.topo_[k]] = k;
  g.agents_ = std::move(agents);
  return g;
}

std::optional<AgentIndex> DependencyGraph::find(std::string_view id) const {
  for (AgentIndex i = 0; i < agents_.size(); ++i) {
    if (agents_[i].id == id) return i;
  }
  return std::nullopt;
}

AgentIndex DependencyGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::UnknownAgentId, "unknown agent '" + std::string(id) + "'");
}

bool DependencyGraph::has_edge(AgentIndex from, AgentIndex to) const {
  return std::find(edges_.begin(), edges_.end(), Edge{from, to}) != edges_.end();
}

double DependencyGraph::max_latency() const {
  double m = 0.0;
  for (const auto& a : agents_) m = std::max(m, a.latency_s);
  return m;
}

double DependencyGraph::total_latency() const {
  // Summed in topological order so WPA prefix sums end exactly on this total.
  double s = 0.0;
  for (AgentIndex i : topo_) s += agents_[i].latency_s;
  return s;
}

double DependencyGraph::mean_response_tokens() const {
  if (agents_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& a : agents_) s += static_cast<double>(a.response_tokens);
  return s / static_cast<double>(agents_.size());
}

std::vector<std::string> topological_order(const DependencyGraph& g) {
  std::vector<std::string> ids;
  ids.reserve(g.size());
  for (AgentIndex i : g.topo_order()) ids.push_back(g.agent(i).id);
  return ids;
}

std::string_view to_string(GraphShape shape) noexcept {
  switch (shape) {
    case GraphShape::LinearChain: return "linear_chain";
    case GraphShape::TwoBranchMerge: return "two_branch_merge";
    case GraphShape::ForkDag: return "fork_dag";
  }
  return "unknown";
}

GraphShape parse_graph_shape(std::string_view name) {
  for (GraphShape s : {GraphShape::LinearChain, GraphShape::TwoBranchMerge, GraphShape::ForkDag}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidInput, "unknown graph shape '" + std::string(name) + "'");
}

DependencyGraph generate_benchmark_graph(GraphShape shape, std::size_t n, double latency_s,
                                         std::int64_t tokens, std::int64_t response_tokens) {
  if (n == 0) throw Error(ErrorCode::IncompatibleShape, "agent count must be >= 1");
  auto name = [](std::size_t k) { return "A" + std::to_string(k); };

  std::vector<AgentProfile> agents;
  agents.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) agents.push_back({name(k), latency_s, tokens, response_tokens});

  std::vector<EdgeIds> edges;
  switch (shape) {
    case GraphShape::LinearChain:
      for (std::size_t k = 1; k < n; ++k) edges.emplace_back(name(k), name(k + 1));
      break;
    case GraphShape::TwoBranchMerge:
      if (n < 4) throw Error(ErrorCode::IncompatibleShape, "two_branch_merge needs n >= 4");
      edges = {{"A1", "A2"}, {"A1", "A3"}, {"A2", "A4"}, {"A3", "A4"}, {"A1", "A4"}};
      for (std::size_t k = 5; k <= n; ++k) edges.emplace_back("A4", name(k));
      break;
    case GraphShape::ForkDag:
      if (n < 3) throw Error(ErrorCode::IncompatibleShape, "fork_dag needs n >= 3");
      for (std::size_t k = 1; k < n; ++k) {
        edges.emplace_back(name(k), name(k + 1));
        if (k % 2 == 1 && k + 2 <= n) edges.emplace_back(name(k), name(k + 2));
      }
      break;
  }
  return DependencyGraph::build(std::move(agents), edges);
}

}  // namespace psmas
