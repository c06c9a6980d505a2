#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "psmas/cost.hpp"
#include "psmas/engine.hpp"
#include "psmas/graph.hpp"
#include "psmas/phase.hpp"

namespace psmas::io {

using Json = nlohmann::ordered_json;

/// Numbers in CSV output: 12 significant digits, shortest form.
std::string format_number(double v);

/// RFC-4180 field quoting.
std::string csv_field(std::string_view s);

/// Joins fields with commas and terminates the record with LF.
std::string csv_row(const std::vector<std::string>& fields);

/// Graph exchange format:
///   {"agents":[{"id":"A1","latency_s":2.0,"cost_tokens":1200,"response_tokens":300}],
///    "edges":[["A1","A2"]]}
/// Unknown fields are rejected; errors name the offending field.
DependencyGraph graph_from_json(const Json& j);
DependencyGraph parse_graph(std::string_view text);
Json graph_to_json(const DependencyGraph& g);

/// {"scheme":"WPA","phases":{"A1":0.0,...}}
Json phase_map_to_json(const DependencyGraph& g, const PhaseMap& map);
PhaseMap phase_map_from_json(const DependencyGraph& g, const Json& j);

Json cost_report_to_json(const CostReport& r);

/// Event log with columns
/// cycle,t,phi,agent_id,event,duration_s,tokens_in,tokens_out,lateness_s.
/// Violation rows name the edge as "from->to" in agent_id.
std::string trace_to_csv(const SimTrace& trace);

/// {violations, cycles, token_totals, converged_at}
Json trace_summary(const SimTrace& trace, const CostParams& quality);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace psmas::io
