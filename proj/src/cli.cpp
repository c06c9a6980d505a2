#include "psmas/cli.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "psmas/analysis.hpp"
#include "psmas/error.hpp"
#include "psmas/io.hpp"
#include "psmas/version.hpp"

namespace psmas::cli {

namespace fs = std::filesystem;
using io::Json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

namespace {

std::string render(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + render(v[i]);
  return s;
}

/// Options of one subcommand, remembered in declaration order so the run
/// manifest can materialize every resolved value and replay can rebuild argv.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& var, const std::string& desc) {
    auto* o = app_->add_option("--" + name, var, desc)->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<double>>) o->delimiter(',');
    entries_.push_back({name, [&var]() -> Json {
                          if constexpr (std::is_same_v<T, double> || std::is_same_v<T, std::vector<double>>) {
                            return render(var);
                          } else {
                            return var;
                          }
                        }});
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    entries_.push_back({name, [&var]() -> Json { return var; }});
    return app_->add_flag("--" + name, var, desc);
  }

  Json resolved() const {
    Json j = Json::object();
    for (const auto& e : entries_) j[e.name] = e.get();
    return j;
  }

 private:
  struct Entry {
    std::string name;
    std::function<Json()> get;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PSMAS_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "PSMAS_SEED must be an unsigned integer");
    }
  }
  return 0;
}

/// Collects outputs of one run and writes them, plus the manifest, atomically.
class RunOutput {
 public:
  RunOutput(std::string subcommand, fs::path dir) : subcommand_(std::move(subcommand)), dir_(std::move(dir)) {}

  void input(const std::string& path) { inputs_[path] = sha256_hex(io::read_file(path)); }
  void file(const std::string& name, std::string content) { files_[name] = std::move(content); }

  void commit(const Json& resolved, std::uint64_t seed) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir_.string() + "': " + ec.message());
    Json outputs = Json::array();
    for (const auto& [name, content] : files_) {
      io::write_file_atomic(dir_ / name, content);
      outputs.push_back(name);
    }
    Json inputs = Json::object();
    for (const auto& [path, digest] : inputs_) inputs[path] = digest;
    const Json manifest{{"tool", "psmas"},   {"version", kVersionString}, {"subcommand", subcommand_},
                        {"seed", seed},      {"resolved", resolved},      {"inputs", std::move(inputs)},
                        {"outputs", outputs}};
    io::write_file_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

  const fs::path& dir() const { return dir_; }

 private:
  std::string subcommand_;
  fs::path dir_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> files_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

DependencyGraph load_graph(const std::string& path) { return io::parse_graph(io::read_file(path)); }

PhaseMap load_phases(const DependencyGraph& g, const std::string& path) {
  Json j;
  try {
    j = Json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("phase map JSON does not parse: ") + e.what());
  }
  return io::phase_map_from_json(g, j);
}

// Settings shared by the simulation-backed subcommands.
struct SimFlags {
  double epsilon = 0.5;
  double omega = 0.0;
  double omega_ratio = 0.85;
  double dt = 0.0;
  double alpha = 0.12;
  bool no_summaries = false;
  double sigma = 0.0;
  int cycles = 10;
  bool controller = false;
  double kp = 0.2;
  double ki = 0.05;
  double threshold = 0.01;
  std::string accounting = "analytic";
  double context = 0.0;

  void add_window(Options& o) {
    o.add("epsilon", epsilon, "activation window width (radians, (0, 2pi])");
  }
  void add_velocity(Options& o) {
    o.add("omega", omega, "absolute sweep velocity (rad/s); overrides --omega-ratio when > 0");
    o.add("omega-ratio", omega_ratio, "sweep velocity as a multiple of the scheme's omega_max (dimensionless)");
  }
  void add_rest(Options& o) {
    o.add("dt", dt, "simulation step (seconds); 0 picks min(eps, 2pi/n)/(4 omega)");
    o.add("alpha", alpha, "idle summary length as a fraction of context (dimensionless, (0, 1])");
    o.flag("no-summaries", no_summaries, "idle agents receive no summary at all");
    o.add("sigma", sigma, "latency noise standard deviation as a fraction of T_max (dimensionless)");
    o.add("cycles", cycles, "maximum number of sweep cycles K (count)");
    o.flag("controller", controller, "enable the PI sweep-velocity controller");
    o.add("kp", kp, "controller proportional gain (rad/s per unit error)");
    o.add("ki", ki, "controller integral gain (rad/s per unit accumulated error)");
    o.add("threshold", threshold, "stop when divergence <= threshold * D0 (fraction; 0 disables)");
    o.add("accounting", accounting, "token ledger reported in the summary line: analytic | event")
        ->check(CLI::IsMember({"analytic", "event"}));
    o.add("context", context, "initial shared context length (tokens)");
  }

  SimConfig config(const DependencyGraph& g, PhaseScheme scheme, std::uint64_t seed) const {
    SimConfig c;
    c.epsilon = epsilon;
    c.omega = omega > 0.0 ? omega : omega_ratio * omega_max(g, scheme);
    c.dt = dt;
    c.alpha = alpha;
    c.delivery = no_summaries ? DeliveryMode::NoSummaries : DeliveryMode::Summaries;
    c.sigma_ratio = sigma;
    c.max_cycles = cycles;
    c.seed = seed;
    c.controller_enabled = controller;
    c.Kp = kp;
    c.Ki = ki;
    c.convergence_threshold = threshold;
    c.accounting = parse_accounting_mode(accounting);
    c.initial_context_tokens = context;
    return c;
  }
};

struct QualityFlags {
  double q_min = 0.95;
  double delta_q = 0.04;
  double c_q = 0.028;
  double l_bar = 50000.0;

  void add(Options& o) {
    o.add("q-min", q_min, "quality floor Q_min (fraction, (0, 1])");
    o.add("delta-q", delta_q, "marginal quality cost per unit of missing context (dimensionless)");
    o.add("c-q", c_q, "quality sensitivity constant C_Q (fraction)");
    o.add("l-bar", l_bar, "mean context length for the optimal window (tokens)");
  }
  CostParams params() const {
    CostParams p;
    p.Q_min = q_min;
    p.delta_Q = delta_q;
    p.C_Q = c_q;
    p.L_bar = l_bar;
    return p;
  }
};

std::string regime_name(const std::optional<Regime>& r) { return r ? std::string(to_string(*r)) : ""; }

struct Cli {
  std::ostream& out;
  std::ostream& err;

  CLI::App app{"Phase-scheduled multi-agent coordination: phase assignment, sweep simulation and analysis", "psmas"};

  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::function<void()> action;
  std::string subcommand;
  std::unique_ptr<Options> options;

  // Flag storage. Members so option callbacks can bind references.
  std::string shape = "linear_chain";
  std::size_t n = 5;
  double latency = 2.0;
  std::int64_t tokens = 1000;
  std::int64_t response_tokens = 0;
  std::string graph_path;
  std::string phases_path;
  std::string scheme = "tpa";
  SimFlags sim;
  QualityFlags quality;
  std::vector<double> epsilons{0.1, 0.3, 0.5, 0.9, 1.5};
  std::vector<double> omega_ratios{0.4, 0.6, 0.8, 0.9, 1.0};
  std::vector<double> alphas{0.12, 0.2, 0.3, 0.4};
  std::size_t trials = 1;
  std::size_t mc_trials = 100000;
  unsigned workers = 1;
  int K = 10;
  double cost_n = 6.0;
  double cost_L = 1000.0;
  double cost_r_bar = 300.0;
  std::string manifest_path;
  std::uint64_t replay_seed = 0;

  Cli(std::ostream& o, std::ostream& e) : out(o), err(e) {
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersionString));
    seed = default_seed();

    auto sub = [&](const std::string& name, const std::string& desc, std::function<void()> body) {
      CLI::App* s = app.add_subcommand(name, desc);
      s->callback([this, name, body] {
        subcommand = name;
        action = body;
      });
      return s;
    };
    auto common = [&](CLI::App* s, Options& o) {
      s->add_option("--out", out_dir, "output directory")->capture_default_str();
      o.add("seed", seed, "random seed (overrides PSMAS_SEED)");
    };
    auto graph_input = [&](CLI::App* s, Options& o) {
      o.add("graph", graph_path, "dependency graph JSON file")->required()->check(CLI::ExistingFile);
      o.add("scheme", scheme, "phase assignment: tpa | wpa")->check(CLI::IsMember({"tpa", "wpa"}, CLI::ignore_case));
      (void)s;
    };

    // Each subcommand gets its own Options; only the one that runs is kept.
    std::vector<std::pair<CLI::App*, std::unique_ptr<Options>>> all;
    auto make = [&](CLI::App* s) -> Options& {
      all.emplace_back(s, std::make_unique<Options>(s));
      return *all.back().second;
    };

    {
      CLI::App* s = sub("gen-graph", "generate a benchmark dependency graph", [this] { gen_graph(); });
      Options& o = make(s);
      common(s, o);
      o.add("shape", shape, "linear_chain | two_branch_merge | fork_dag")
          ->check(CLI::IsMember({"linear_chain", "two_branch_merge", "fork_dag"}));
      o.add("n", n, "number of agents (count)");
      o.add("latency", latency, "per-agent expected latency (seconds)");
      o.add("tokens", tokens, "per-agent expected token cost (tokens)");
      o.add("response-tokens", response_tokens, "per-agent response length (tokens)");
    }
    {
      CLI::App* s = sub("assign", "assign phases to a graph", [this] { assign(); });
      Options& o = make(s);
      common(s, o);
      graph_input(s, o);
    }
    {
      CLI::App* s = sub("simulate", "run the sweep simulation with mock agents", [this] { simulate(); });
      Options& o = make(s);
      common(s, o);
      graph_input(s, o);
      o.add("phases", phases_path, "phase map JSON (overrides --scheme)")->check(CLI::ExistingFile);
      sim.add_window(o);
      sim.add_velocity(o);
      sim.add_rest(o);
      quality.add(o);
    }
    {
      CLI::App* s = sub("sweep-field", "scan the (eps, omega/omega_max) plane", [this] { sweep_field(); });
      Options& o = make(s);
      common(s, o);
      graph_input(s, o);
      o.add("epsilons", epsilons, "window widths to scan (radians, comma separated)");
      o.add("omega-ratios", omega_ratios, "velocity ratios to scan (dimensionless, comma separated)");
      o.add("alpha", sim.alpha, "compression ratio (dimensionless, (0, 1])");
      o.add("sigma", sim.sigma, "latency noise as a fraction of T_max (dimensionless)");
      o.add("cycles", sim.cycles, "cycles per simulation (count)");
      o.add("trials", trials, "simulations per grid point (count)");
      o.add("context", sim.context, "initial shared context length (tokens)");
      s->add_option("--workers", workers, "worker threads; results do not depend on it")->capture_default_str();
    }
    {
      CLI::App* s = sub("alpha-sweep", "split token savings into scheduling and compression gains",
                        [this] { alpha_sweep(); });
      Options& o = make(s);
      common(s, o);
      graph_input(s, o);
      sim.add_window(o);
      o.add("alphas", alphas, "compression ratios (dimensionless, comma separated)");
      o.add("omega-ratio", sim.omega_ratio, "sweep velocity as a multiple of omega_max (dimensionless)");
      o.add("cycles", sim.cycles, "cycles per simulation (count)");
      o.add("context", sim.context, "initial shared context length (tokens)");
    }
    {
      CLI::App* s = sub("mc-violations", "Monte Carlo ordering-violation rates per edge",
                        [this] { mc_violations(); });
      Options& o = make(s);
      common(s, o);
      graph_input(s, o);
      sim.add_velocity(o);
      o.add("sigma", sim.sigma, "latency noise as a fraction of T_max (dimensionless)");
      o.add("trials", mc_trials, "Monte Carlo trials (count, >= 1000)");
    }
    {
      CLI::App* s = sub("optimal-epsilon", "evaluate the optimal window and the closed-form cost report",
                        [this] { optimal_epsilon_cmd(); });
      Options& o = make(s);
      common(s, o);
      quality.add(o);
      o.add("alpha", sim.alpha, "compression ratio (dimensionless, (0, 1])");
      o.add("epsilon", sim.epsilon, "window for the cost report (radians, (0, 2pi])");
      o.add("agents", cost_n, "agent count n (count)");
      o.add("context", cost_L, "context length L (tokens)");
      o.add("response", cost_r_bar, "mean response length R_bar (tokens)");
      o.add("omega-ratio", sim.omega_ratio, "velocity ratio for the regime label (dimensionless)");
    }
    {
      CLI::App* s = sub("convergence", "divergence contraction over K cycles", [this] { convergence(); });
      Options& o = make(s);
      common(s, o);
      o.add("epsilons", epsilons, "window widths (radians, comma separated)");
      o.add("alphas", alphas, "compression ratios (dimensionless, comma separated)");
      o.add("K", K, "number of cycles (count)");
    }
    {
      CLI::App* s = app.add_subcommand("replay", "re-run a subcommand from its manifest.json");
      s->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
      s->add_option("--out", out_dir, "output directory")->capture_default_str();
      s->add_option("--seed", replay_seed, "override the recorded seed");
      s->callback([this, s] {
        subcommand = "replay";
        const bool seed_override = s->count("--seed") > 0;
        action = [this, seed_override] { replay(seed_override); };
      });
    }

    options_by_app = std::move(all);
  }

  std::vector<std::pair<CLI::App*, std::unique_ptr<Options>>> options_by_app;

  Json resolved_for(const std::string& name) const {
    for (const auto& [s, o] : options_by_app) {
      if (s->get_name() == name) return o->resolved();
    }
    return Json::object();
  }

  void finish(RunOutput& run, const std::string& summary) {
    run.commit(resolved_for(subcommand), seed);
    out << summary << " -> " << run.dir().string() << "\n";
  }

  PhaseScheme scheme_value() const { return parse_phase_scheme(scheme); }

  void gen_graph() {
    RunOutput run(subcommand, out_dir);
    const DependencyGraph g =
        generate_benchmark_graph(parse_graph_shape(shape), n, latency, tokens, response_tokens);
    run.file("graph.json", dump(io::graph_to_json(g)));
    finish(run, "gen-graph: " + shape + " with " + std::to_string(g.size()) + " agents, " +
                    std::to_string(g.edges().size()) + " edges");
  }

  void assign() {
    RunOutput run(subcommand, out_dir);
    run.input(graph_path);
    const DependencyGraph g = load_graph(graph_path);
    const PhaseScheme sch = scheme_value();
    const PhaseMap map = assign_phases(g, sch);
    run.file("phases.json", dump(io::phase_map_to_json(g, map)));
    finish(run, "assign: " + std::string(to_string(sch)) + " phases for " + std::to_string(g.size()) +
                    " agents, omega_max " + io::format_number(omega_max(g, sch)) + " rad/s");
  }

  void simulate() {
    RunOutput run(subcommand, out_dir);
    run.input(graph_path);
    const DependencyGraph g = load_graph(graph_path);
    PhaseMap phases;
    if (!phases_path.empty()) {
      run.input(phases_path);
      phases = load_phases(g, phases_path);
    } else {
      phases = assign_phases(g, scheme_value());
    }
    const SimConfig cfg = sim.config(g, phases.scheme, seed);
    const SimTrace trace = run_simulation(g, phases, cfg);
    const CostParams q = quality.params();

    Json summary = io::trace_summary(trace, q);
    summary["omega"] = cfg.omega;
    summary["omega_max"] = omega_max(g, phases.scheme);
    summary["scheme"] = std::string(to_string(phases.scheme));
    run.file("trace.csv", io::trace_to_csv(trace));
    run.file("summary.json", dump(summary));

    const CostReport ledger = token_totals(trace, cfg.accounting, q);
    const double fraction = ledger.cost_full > 0.0 ? ledger.cost_psmas / ledger.cost_full : 1.0;
    finish(run, "simulate: " + std::to_string(trace.completed_cycles()) + " cycles, " +
                    std::to_string(trace.violations.size()) + " violations, " +
                    std::string(to_string(cfg.accounting)) + " token fraction " + io::format_number(fraction));
  }

  void sweep_field() {
    RunOutput run(subcommand, out_dir);
    run.input(graph_path);
    const DependencyGraph g = load_graph(graph_path);
    analysis::ScanGrid grid;
    grid.epsilons = epsilons;
    grid.omega_ratios = omega_ratios;
    grid.alpha = sim.alpha;
    grid.trials_per_point = trials;
    grid.master_seed = seed;
    grid.scheme = scheme_value();
    SimConfig tmpl;
    tmpl.sigma_ratio = sim.sigma;
    tmpl.max_cycles = sim.cycles;
    tmpl.convergence_threshold = 0.0;
    tmpl.initial_context_tokens = sim.context;
    const auto rows = analysis::sweep_field_scan(g, grid, tmpl, workers);

    std::string csv = io::csv_row({"epsilon", "omega_ratio", "f", "rho_theory", "sim_token_fraction",
                                   "event_token_fraction", "violation_rate", "regime", "error"});
    std::size_t failed = 0;
    for (const auto& r : rows) {
      if (!r.error.empty()) ++failed;
      csv += io::csv_row({io::format_number(r.epsilon), io::format_number(r.omega_ratio), io::format_number(r.f),
                          io::format_number(r.rho_theory), io::format_number(r.sim_token_fraction),
                          io::format_number(r.event_token_fraction), io::format_number(r.violation_rate),
                          regime_name(r.regime), r.error});
    }
    Json config = resolved_for(subcommand);
    const Json summary{{"tool_version", kVersionString},
                       {"config", config},
                       {"points", rows.size()},
                       {"failed_points", failed}};
    run.file("sweep_field.csv", csv);
    run.file("sweep_field.json", dump(summary));
    finish(run, "sweep-field: " + std::to_string(rows.size()) + " points, " + std::to_string(failed) + " failed");
  }

  void alpha_sweep() {
    RunOutput run(subcommand, out_dir);
    run.input(graph_path);
    const DependencyGraph g = load_graph(graph_path);
    const PhaseScheme sch = scheme_value();
    const PhaseMap phases = assign_phases(g, sch);
    SimConfig tmpl;
    tmpl.omega = sim.omega_ratio * omega_max(g, sch);
    tmpl.max_cycles = sim.cycles;
    tmpl.initial_context_tokens = sim.context;
    tmpl.seed = seed;
    const auto rows = analysis::alpha_sweep(g, phases, sim.epsilon, alphas, tmpl);
    std::string csv = io::csv_row({"alpha", "token_cost_fraction", "scheduling_gain", "compression_gain"});
    for (const auto& r : rows) {
      csv += io::csv_row({io::format_number(r.alpha), io::format_number(r.token_cost_fraction),
                          io::format_number(r.scheduling_gain), io::format_number(r.compression_gain)});
    }
    run.file("alpha_sweep.csv", csv);
    finish(run, "alpha-sweep: " + std::to_string(rows.size()) + " rows, scheduling gain " +
                    io::format_number(rows.front().scheduling_gain));
  }

  void mc_violations() {
    RunOutput run(subcommand, out_dir);
    run.input(graph_path);
    const DependencyGraph g = load_graph(graph_path);
    const PhaseScheme sch = scheme_value();
    const PhaseMap phases = assign_phases(g, sch);
    const double omega = sim.omega > 0.0 ? sim.omega : sim.omega_ratio * omega_max(g, sch);
    const auto stats = analysis::monte_carlo_violation_rate(g, phases, omega, sim.sigma, mc_trials, seed);
    std::string csv =
        io::csv_row({"from", "to", "slack_s", "empirical_rate", "analytic_bound", "stderr", "within_3se"});
    std::size_t within = 0;
    for (const auto& s : stats) {
      within += s.within() ? 1 : 0;
      csv += io::csv_row({g.agent(s.edge.from).id, g.agent(s.edge.to).id, io::format_number(s.slack_s),
                          io::format_number(s.empirical_rate), io::format_number(s.analytic_bound),
                          io::format_number(s.stderr_rate), s.within() ? "true" : "false"});
    }
    run.file("mc_violations.csv", csv);
    finish(run, "mc-violations: " + std::to_string(stats.size()) + " edges, " + std::to_string(within) +
                    " within 3 standard errors");
  }

  void optimal_epsilon_cmd() {
    RunOutput run(subcommand, out_dir);
    CostParams p = quality.params();
    p.n = cost_n;
    p.L = cost_L;
    p.R_bar = cost_r_bar;
    p.alpha = sim.alpha;
    p.epsilon = sim.epsilon;
    const double eps_star = psmas::optimal_epsilon(p.Q_min, p.delta_Q, p.alpha, p.L_bar);
    const CostReport report = make_cost_report(p, sim.omega_ratio);
    run.file("cost_report.json", dump(io::cost_report_to_json(report)));
    finish(run, "optimal-epsilon: eps* = " + io::format_number(eps_star) + " rad");
  }

  void convergence() {
    RunOutput run(subcommand, out_dir);
    const auto rows = analysis::convergence_study(epsilons, alphas, K);
    std::string csv = io::csv_row({"epsilon", "alpha", "factor", "D_K", "bound_satisfied"});
    std::size_t ok = 0;
    for (const auto& r : rows) {
      ok += r.bound_satisfied ? 1 : 0;
      csv += io::csv_row({io::format_number(r.epsilon), io::format_number(r.alpha), io::format_number(r.factor),
                          io::format_number(r.D_K), r.bound_satisfied ? "true" : "false"});
    }
    run.file("convergence.csv", csv);
    finish(run, "convergence: " + std::to_string(rows.size()) + " rows, " + std::to_string(ok) +
                    " within the contraction bound");
  }

  // Rebuilt argv is run through a fresh parser, so replay exercises exactly
  // the same code path as the original invocation.
  int replay_status = kOk;

  void replay(bool seed_override) {
    Json m;
    try {
      m = Json::parse(io::read_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, std::string("manifest does not parse: ") + e.what());
    }
    if (!m.contains("subcommand") || !m.contains("resolved") || !m.at("resolved").is_object()) {
      throw Error(ErrorCode::InvalidInput, "manifest lacks 'subcommand' or 'resolved'");
    }
    if (m.contains("inputs")) {
      for (const auto& [path, digest] : m.at("inputs").items()) {
        if (sha256_hex(io::read_file(path)) != digest.get<std::string>()) {
          throw Error(ErrorCode::InvalidInput, "input '" + path + "' changed since the recorded run");
        }
      }
    }
    std::vector<std::string> args{m.at("subcommand").get<std::string>()};
    for (const auto& [key, value] : m.at("resolved").items()) {
      if (key == "seed" && seed_override) continue;
      if (value.is_boolean()) {
        if (value.get<bool>()) args.push_back("--" + key);
        continue;
      }
      std::string text = value.is_string() ? value.get<std::string>() : value.dump();
      if (text.empty()) continue;
      args.push_back("--" + key);
      args.push_back(text);
    }
    if (seed_override) {
      args.push_back("--seed");
      args.push_back(std::to_string(replay_seed));
    }
    args.push_back("--out");
    args.push_back(out_dir);
    replay_status = run_cli(args, out, err);
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << cli.app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << cli.app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersionString << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << cli.app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_validation() ? kUsage : kRuntime;
  }

  try {
    cli.action();
    return cli.subcommand == "replay" ? cli.replay_status : kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_validation() ? kUsage : kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace psmas::cli
