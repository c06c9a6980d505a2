#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "psmas/analysis.hpp"
#include "psmas/cli.hpp"
#include "psmas/error.hpp"
#include "psmas/io.hpp"
#include "psmas/version.hpp"

namespace py = pybind11;
using namespace psmas;

namespace {

py::dict trace_dict(const SimTrace& t) {
  py::list invocations;
  for (const auto& inv : t.invocations) {
    py::dict d;
    d["agent"] = t.agent_ids[inv.agent];
    d["cycle"] = inv.cycle;
    d["start_t"] = inv.start_t;
    d["phi"] = inv.phi;
    d["duration_s"] = inv.duration_s;
    d["tokens_in"] = inv.tokens_in;
    d["tokens_out"] = inv.tokens_out;
    invocations.append(d);
  }
  py::list violations;
  for (const auto& v : t.violations) {
    py::dict d;
    d["edge"] = py::make_tuple(t.agent_ids[v.edge.from], t.agent_ids[v.edge.to]);
    d["cycle"] = v.cycle;
    d["lateness_s"] = v.lateness_s;
    violations.append(d);
  }
  py::dict out;
  out["cycles"] = t.completed_cycles();
  out["resolved_dt"] = t.resolved_dt;
  out["omega_ratio"] = t.omega_ratio ? py::cast(*t.omega_ratio) : py::none();
  out["invocations"] = invocations;
  out["violations"] = violations;
  out["divergence_curve"] = t.divergence_curve;
  out["omega_curve"] = t.omega_curve;
  out["converged_at"] = t.converged_at ? py::cast(*t.converged_at) : py::none();
  out["csv"] = io::trace_to_csv(t);
  out["summary_json"] = io::trace_summary(t, CostParams{}).dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_psmas, m) {
  m.doc() = "Phase-scheduled multi-agent coordination: phases, sweep simulation, cost model";
  m.attr("__version__") = kVersionString;

  static py::exception<Error> error_type(m, "PsmasError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object code = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(error_type.ptr(), py::make_tuple(py::str(e.what()), code).ptr());
    }
  });

  py::class_<AgentProfile>(m, "AgentProfile")
      .def(py::init([](std::string id, double latency_s, std::int64_t cost_tokens, std::int64_t response_tokens) {
             return AgentProfile{std::move(id), latency_s, cost_tokens, response_tokens};
           }),
           py::arg("id"), py::arg("latency_s"), py::arg("cost_tokens") = 0, py::arg("response_tokens") = 0)
      .def_readwrite("id", &AgentProfile::id)
      .def_readwrite("latency_s", &AgentProfile::latency_s)
      .def_readwrite("cost_tokens", &AgentProfile::cost_tokens)
      .def_readwrite("response_tokens", &AgentProfile::response_tokens);

  py::class_<DependencyGraph>(m, "DependencyGraph")
      .def_static("build", &DependencyGraph::build, py::arg("agents"), py::arg("edges"))
      .def_static("from_json", [](const std::string& text) { return io::parse_graph(text); })
      .def("to_json", [](const DependencyGraph& g) { return io::graph_to_json(g).dump(); })
      .def("__len__", &DependencyGraph::size)
      .def_property_readonly("agents", &DependencyGraph::agents)
      .def_property_readonly("edges",
                             [](const DependencyGraph& g) {
                               std::vector<EdgeIds> out;
                               for (const Edge& e : g.edges()) out.emplace_back(g.agent(e.from).id, g.agent(e.to).id);
                               return out;
                             })
      .def("topological_order", [](const DependencyGraph& g) { return topological_order(g); })
      .def("max_latency", &DependencyGraph::max_latency)
      .def("total_latency", &DependencyGraph::total_latency);

  m.def(
      "generate_benchmark_graph",
      [](const std::string& shape, std::size_t n, double latency_s, std::int64_t tokens, std::int64_t response_tokens) {
        return generate_benchmark_graph(parse_graph_shape(shape), n, latency_s, tokens, response_tokens);
      },
      py::arg("shape"), py::arg("n"), py::arg("latency_s") = 1.0, py::arg("tokens") = 0, py::arg("response_tokens") = 0);

  py::class_<PhaseMap>(m, "PhaseMap")
      .def_property_readonly("scheme", [](const PhaseMap& p) { return std::string(to_string(p.scheme)); })
      .def_readonly("phases", &PhaseMap::phases);

  m.def("circular_distance", &circular_distance);
  m.def(
      "assign_phases",
      [](const DependencyGraph& g, const std::string& scheme) { return assign_phases(g, parse_phase_scheme(scheme)); },
      py::arg("graph"), py::arg("scheme") = "tpa");
  m.def("phases_by_id", [](const DependencyGraph& g, const PhaseMap& p) {
    py::dict d;
    for (AgentIndex i = 0; i < g.size(); ++i) d[py::str(g.agent(i).id)] = p[i];
    return d;
  });
  m.def(
      "omega_max",
      [](const DependencyGraph& g, const std::string& scheme) { return omega_max(g, parse_phase_scheme(scheme)); },
      py::arg("graph"), py::arg("scheme") = "tpa");
  m.def(
      "phase_slack",
      [](const DependencyGraph& g, const PhaseMap& p, double omega, const std::string& from, const std::string& to) {
        return phase_slack(g, p, omega, from, to);
      },
      py::arg("graph"), py::arg("phases"), py::arg("omega"), py::arg("from_id"), py::arg("to_id"));

  py::class_<CostParams>(m, "CostParams")
      .def(py::init<>())
      .def_readwrite("n", &CostParams::n)
      .def_readwrite("L", &CostParams::L)
      .def_readwrite("R_bar", &CostParams::R_bar)
      .def_readwrite("alpha", &CostParams::alpha)
      .def_readwrite("epsilon", &CostParams::epsilon)
      .def_readwrite("Q_min", &CostParams::Q_min)
      .def_readwrite("delta_Q", &CostParams::delta_Q)
      .def_readwrite("C_Q", &CostParams::C_Q)
      .def_readwrite("L_bar", &CostParams::L_bar);

  m.def("activation_fraction", &activation_fraction);
  m.def("cost_full", &cost_full);
  m.def("cost_psmas", &cost_psmas);
  m.def("reduction_ratio", &reduction_ratio);
  m.def("decompose_gains", [](const CostParams& p) {
    const auto g = decompose_gains(p);
    return py::make_tuple(g.scheduling, g.compression);
  });
  m.def("optimal_epsilon", &optimal_epsilon, py::arg("Q_min"), py::arg("delta_Q"), py::arg("alpha"), py::arg("L_bar"));
  m.def("quality_bound", &quality_bound);
  m.def("violation_probability_bound", &violation_probability_bound);
  m.def("expected_violations", &expected_violations);
  m.def("classify_regime", [](double e, double r) { return std::string(to_string(classify_regime(e, r))); });
  m.def("convergence_factor", &convergence_factor);
  m.def(
      "cost_report",
      [](const CostParams& p, std::optional<double> omega_ratio) {
        return io::cost_report_to_json(make_cost_report(p, omega_ratio)).dump();
      },
      py::arg("params"), py::arg("omega_ratio") = py::none());

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &SimConfig::epsilon)
      .def_readwrite("omega", &SimConfig::omega)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("alpha", &SimConfig::alpha)
      .def_property(
          "no_summaries", [](const SimConfig& c) { return c.delivery == DeliveryMode::NoSummaries; },
          [](SimConfig& c, bool v) { c.delivery = v ? DeliveryMode::NoSummaries : DeliveryMode::Summaries; })
      .def_readwrite("sigma_ratio", &SimConfig::sigma_ratio)
      .def_readwrite("max_cycles", &SimConfig::max_cycles)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("controller_enabled", &SimConfig::controller_enabled)
      .def_readwrite("Kp", &SimConfig::Kp)
      .def_readwrite("Ki", &SimConfig::Ki)
      .def_readwrite("convergence_threshold", &SimConfig::convergence_threshold)
      .def_readwrite("initial_context_tokens", &SimConfig::initial_context_tokens);

  m.def(
      "run_simulation",
      [](const DependencyGraph& g, const PhaseMap& p, const SimConfig& c) {
        SimTrace t;
        {
          py::gil_scoped_release release;
          t = run_simulation(g, p, c);
        }
        return trace_dict(t);
      },
      py::arg("graph"), py::arg("phases"), py::arg("config"));

  m.def("pi_controller_step",
        [](double omega, double integral, double observed, double t_max, double kp, double ki) {
          const auto s = pi_controller_step({omega, integral}, observed, t_max, kp, ki);
          return py::make_tuple(s.omega, s.error_integral);
        },
        py::arg("omega"), py::arg("error_integral"), py::arg("observed_latency_s"), py::arg("T_max"),
        py::arg("Kp") = 0.2, py::arg("Ki") = 0.05);

  m.def(
      "monte_carlo_violation_rate",
      [](const DependencyGraph& g, const PhaseMap& p, double omega, double sigma_ratio, std::size_t trials,
         std::uint64_t seed) {
        py::list rows;
        for (const auto& s : analysis::monte_carlo_violation_rate(g, p, omega, sigma_ratio, trials, seed)) {
          py::dict d;
          d["edge"] = py::make_tuple(g.agent(s.edge.from).id, g.agent(s.edge.to).id);
          d["slack_s"] = s.slack_s;
          d["empirical_rate"] = s.empirical_rate;
          d["analytic_bound"] = s.analytic_bound;
          d["stderr"] = s.stderr_rate;
          rows.append(d);
        }
        return rows;
      },
      py::arg("graph"), py::arg("phases"), py::arg("omega"), py::arg("sigma_ratio"), py::arg("trials"),
      py::arg("seed") = 0);

  m.def(
      "sweep_field_scan",
      [](const DependencyGraph& g, std::vector<double> epsilons, std::vector<double> ratios, double alpha,
         std::size_t trials, std::uint64_t seed, const SimConfig& tmpl, unsigned workers) {
        analysis::ScanGrid grid;
        grid.epsilons = std::move(epsilons);
        grid.omega_ratios = std::move(ratios);
        grid.alpha = alpha;
        grid.trials_per_point = trials;
        grid.master_seed = seed;
        std::vector<analysis::ScanRow> rows;
        {
          py::gil_scoped_release release;
          rows = analysis::sweep_field_scan(g, grid, tmpl, workers);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["epsilon"] = r.epsilon;
          d["omega_ratio"] = r.omega_ratio;
          d["f"] = r.f;
          d["rho_theory"] = r.rho_theory;
          d["sim_token_fraction"] = r.sim_token_fraction;
          d["event_token_fraction"] = r.event_token_fraction;
          d["violation_rate"] = r.violation_rate;
          d["regime"] = r.regime ? py::cast(std::string(to_string(*r.regime))) : py::none();
          d["error"] = r.error;
          out.append(d);
        }
        return out;
      },
      py::arg("graph"), py::arg("epsilons"), py::arg("omega_ratios"), py::arg("alpha") = 0.12, py::arg("trials") = 1,
      py::arg("seed") = 0, py::arg("template") = SimConfig{}, py::arg("workers") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
