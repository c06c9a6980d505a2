#include "psmas/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "psmas/error.hpp"

namespace psmas::io {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidInput, "field '" + field + "': " + why);
}

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      bad_field(where + key, "unknown field");
    }
  }
}

std::int64_t token_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return 0;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(where + key, "expected a nonnegative integer");
  const auto x = v.get<std::int64_t>();
  if (x < 0) bad_field(where + key, "must be >= 0");
  return x;
}

}  // namespace

DependencyGraph graph_from_json(const Json& j) {
  if (!j.is_object()) bad_field("<root>", "expected an object");
  reject_unknown(j, {"agents", "edges"}, "");
  if (!j.contains("agents") || !j.at("agents").is_array()) bad_field("agents", "expected an array");

  std::vector<AgentProfile> agents;
  const Json& list = j.at("agents");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "agents[" + std::to_string(k) + "].";
    const Json& a = list[k];
    if (!a.is_object()) bad_field("agents[" + std::to_string(k) + "]", "expected an object");
    reject_unknown(a, {"id", "latency_s", "cost_tokens", "response_tokens"}, where);
    if (!a.contains("id") || !a.at("id").is_string()) bad_field(where + "id", "expected a string");
    if (!a.contains("latency_s") || !a.at("latency_s").is_number()) bad_field(where + "latency_s", "expected a number");
    AgentProfile p;
    p.id = a.at("id").get<std::string>();
    p.latency_s = a.at("latency_s").get<double>();
    if (!(p.latency_s > 0.0)) bad_field(where + "latency_s", "must be > 0");
    p.cost_tokens = token_field(a, "cost_tokens", where);
    p.response_tokens = token_field(a, "response_tokens", where);
    agents.push_back(std::move(p));
  }

  std::vector<EdgeIds> edges;
  if (j.contains("edges")) {
    const Json& e = j.at("edges");
    if (!e.is_array()) bad_field("edges", "expected an array");
    for (std::size_t k = 0; k < e.size(); ++k) {
      const Json& pair = e[k];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        bad_field("edges[" + std::to_string(k) + "]", "expected [\"from\", \"to\"]");
      }
      edges.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  return DependencyGraph::build(std::move(agents), edges);
}

DependencyGraph parse_graph(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("graph JSON does not parse: ") + e.what());
  }
  return graph_from_json(j);
}

Json graph_to_json(const DependencyGraph& g) {
  Json agents = Json::array();
  for (const auto& a : g.agents()) {
    agents.push_back(Json{{"id", a.id},
                          {"latency_s", a.latency_s},
                          {"cost_tokens", a.cost_tokens},
                          {"response_tokens", a.response_tokens}});
  }
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back(Json::array({g.agent(e.from).id, g.agent(e.to).id}));
  return Json{{"agents", std::move(agents)}, {"edges", std::move(edges)}};
}

Json phase_map_to_json(const DependencyGraph& g, const PhaseMap& map) {
  check_phase_map(g, map);
  Json phases = Json::object();
  for (AgentIndex i : g.topo_order()) phases[g.agent(i).id] = map[i];
  return Json{{"scheme", std::string(to_string(map.scheme))}, {"phases", std::move(phases)}};
}

PhaseMap phase_map_from_json(const DependencyGraph& g, const Json& j) {
  if (!j.is_object()) bad_field("<root>", "expected an object");
  reject_unknown(j, {"scheme", "phases"}, "");
  if (!j.contains("scheme") || !j.at("scheme").is_string()) bad_field("scheme", "expected \"TPA\" or \"WPA\"");
  if (!j.contains("phases") || !j.at("phases").is_object()) bad_field("phases", "expected an object");
  PhaseMap map{parse_phase_scheme(j.at("scheme").get<std::string>()), std::vector<double>(g.size(), -1.0)};
  std::set<AgentIndex> seen;
  for (const auto& [id, value] : j.at("phases").items()) {
    auto idx = g.find(id);
    if (!idx) throw Error(ErrorCode::PhaseMapMismatch, "phase given for unknown agent '" + id + "'");
    if (!value.is_number()) bad_field("phases." + id, "expected a number");
    map.phases[*idx] = value.get<double>();
    seen.insert(*idx);
  }
  if (seen.size() != g.size()) throw Error(ErrorCode::PhaseMapMismatch, "phase map does not cover every agent");
  check_phase_map(g, map);
  return map;
}

Json cost_report_to_json(const CostReport& r) {
  Json j{{"rho", r.rho},
         {"f", r.f},
         {"cost_full", r.cost_full},
         {"cost_psmas", r.cost_psmas},
         {"scheduling_gain", r.scheduling_gain},
         {"compression_gain", r.compression_gain}};
  j["epsilon_star"] = r.epsilon_star ? Json(*r.epsilon_star) : Json(nullptr);
  j["quality_bound"] = r.quality_bound;
  j["regime"] = r.regime ? Json(std::string(to_string(*r.regime))) : Json(nullptr);
  return j;
}

std::string trace_to_csv(const SimTrace& trace) {
  enum Kind { kInvoke = 0, kRefresh = 1, kViolation = 2 };
  struct Row {
    int cycle;
    double t;
    int kind;
    std::size_t order;
    std::vector<std::string> fields;
  };
  std::vector<Row> rows;
  const auto& ids = trace.agent_ids;

  for (std::size_t k = 0; k < trace.invocations.size(); ++k) {
    const auto& inv = trace.invocations[k];
    rows.push_back({inv.cycle, inv.start_t, kInvoke, k,
                    {std::to_string(inv.cycle), format_number(inv.start_t), format_number(inv.phi), ids[inv.agent],
                     "invoke", format_number(inv.duration_s), format_number(inv.tokens_in),
                     format_number(inv.tokens_out), ""}});
  }
  for (std::size_t k = 0; k < trace.refreshes.size(); ++k) {
    const auto& r = trace.refreshes[k];
    rows.push_back({r.cycle, r.t, kRefresh, k,
                    {std::to_string(r.cycle), format_number(r.t), "", ids[r.agent], "idle_refresh", "", "",
                     format_number(r.tokens), ""}});
  }
  for (std::size_t k = 0; k < trace.violations.size(); ++k) {
    const auto& v = trace.violations[k];
    double t = 0.0;
    double phi = 0.0;
    for (const auto& inv : trace.invocations) {
      if (inv.agent == v.edge.to && inv.cycle == v.cycle) {
        t = inv.start_t;
        phi = inv.phi;
        break;
      }
    }
    rows.push_back({v.cycle, t, kViolation, k,
                    {std::to_string(v.cycle), format_number(t), format_number(phi),
                     ids[v.edge.from] + "->" + ids[v.edge.to], "violation", "", "", "",
                     format_number(v.lateness_s)}});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.cycle, a.t, a.kind, a.order) < std::tie(b.cycle, b.t, b.kind, b.order);
  });

  std::string out =
      csv_row({"cycle", "t", "phi", "agent_id", "event", "duration_s", "tokens_in", "tokens_out", "lateness_s"});
  for (const auto& r : rows) out += csv_row(r.fields);
  return out;
}

Json trace_summary(const SimTrace& trace, const CostParams& quality) {
  Json totals{{"analytic", cost_report_to_json(token_totals(trace, AccountingMode::Analytic, quality))}};
  if (trace.config.record_details) {
    totals["event"] = cost_report_to_json(token_totals(trace, AccountingMode::Event, quality));
  }
  Json per_edge = Json::array();
  const auto counts = trace.violations_per_edge();
  for (std::size_t k = 0; k < trace.edges.size(); ++k) {
    const Edge& e = trace.edges[k];
    per_edge.push_back(Json{{"edge", Json::array({trace.agent_ids[e.from], trace.agent_ids[e.to]})},
                            {"violations", counts[k]}});
  }
  return Json{{"violations", trace.violations.size()},
              {"cycles", trace.completed_cycles()},
              {"token_totals", std::move(totals)},
              {"converged_at", trace.converged_at ? Json(*trace.converged_at) : Json(nullptr)},
              {"violations_per_edge", std::move(per_edge)},
              {"final_divergence", trace.divergence_curve.back()}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename onto '" + path.string() + "': " + ec.message());
}

}  // namespace psmas::io
