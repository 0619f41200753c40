#include "pco_cli/app.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "pco/analysis.hpp"
#include "pco/experiments.hpp"
#include "pco/prc.hpp"
#include "pco/trajectory_io.hpp"
#include "pco_cli/config.hpp"

namespace pco::cli {
namespace {

namespace fs = std::filesystem;

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

fs::path default_out(const std::string& leaf) {
  const char* env = std::getenv(kOutDirEnv);
  fs::path root = env && *env ? fs::path(env) : fs::path("pco-out");
  return leaf.empty() ? root : root / leaf;
}

struct SimulateArgs {
  std::string config;
  std::size_t n = 0;
  std::string prc;
  std::string x0;
  double omega = 0.0;
  double horizon = 0.0;
  double epsilon = 0.0;
  double frequency = 0.0;
  std::string policy;
  std::uint64_t seed = 0;
  double sample_dt = 0.0;
  std::size_t max_jumps = 0;
  bool no_stop = false;
  bool allow_invalid = false;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  fs::path out_dir;
  try {
    SimDraft d = a.config.empty() ? SimDraft{} : load_config(a.config);
    // Flags override file values.
    if (sub.count("--n")) d.n = a.n;
    if (sub.count("--prc")) d.prc = a.prc;
    if (sub.count("--x0")) d.x0 = parse_list(a.x0, "--x0");
    if (sub.count("--omega")) d.omega = a.omega;
    if (sub.count("--horizon")) d.horizon = a.horizon;
    if (sub.count("--epsilon")) d.epsilon = a.epsilon;
    if (sub.count("--frequency")) d.frequency = a.frequency;
    if (sub.count("--seed")) d.seed = a.seed;
    if (sub.count("--sample-dt")) d.sample_dt = a.sample_dt;
    if (sub.count("--max-jumps")) d.max_jumps = a.max_jumps;
    if (sub.count("--policy")) {
      try {
        d.policy = parse_policy(a.policy);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--policy: ") + e.what());
      }
    }
    if (a.no_stop) d.stop = StopRule::horizon_only();
    if (a.allow_invalid) d.allow_invalid_prc = true;
    if (sub.count("--out")) d.out = a.out;
    out_dir = d.out ? fs::path(*d.out) : default_out(d.name.empty() ? "simulate" : d.name);
    cfg = build_config(d);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (!cfg.allow_invalid_prc && !cfg.prc.is_valid()) {
    err << "error: PRC '" << cfg.prc.name() << "' fails validation\n" << cfg.prc.validation()->summary() << "\n";
    return kFailure;
  }
  HybridArc arc;
  try {
    arc = run(cfg);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  io::write_trajectory_csv(arc, out_dir / "trajectory.csv");
  io::write_events_csv(arc, out_dir / "events.csv");
  io::write_jump_trace_csv(arc, out_dir / "v_trace.csv");

  out << "termination   " << to_string(arc.termination) << "\n";
  out << "terminal t    " << g12(arc.terminal_time()) << "\n";
  out << "terminal V    " << g12(lyapunov(arc.terminal_state())) << "\n";
  out << "jumps         " << arc.events.size() << "\n";
  out << "min dwell     " << g12(arc.min_dwell_after_first_jump()) << "\n";
  out << "output        " << out_dir.string() << "\n";
  if (arc.diagnostic_failure()) {
    err << "diagnostic: " << arc.diagnostic << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_validate(const std::string& spec, std::size_t n, std::size_t grid, double lipschitz, std::ostream& out,
                 std::ostream& err) {
  PhaseResponse q;
  try {
    q = prc::from_spec(spec, n);
  } catch (const std::exception& e) {
    err << "error: --prc: " << e.what() << "\n";
    return kUsage;
  }
  ValidationReport rep;
  try {
    rep = validate_prc(q.function(), n, ValidationOptions{grid, lipschitz});
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  out << q.name() << ": " << rep.summary();
  return rep.passed() ? kOk : kFailure;
}

struct ExperimentArgs {
  std::string name;
  std::string out;
  std::size_t samples = 0;
  std::size_t runs = 100;
  std::uint64_t seed = experiments::kDefaultSeed;
  std::size_t threads = 0;
};

int cmd_experiment(const ExperimentArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const fs::path dir = sub.count("--out") ? fs::path(a.out) : default_out(a.name);
  experiments::Report rep;
  try {
    if (a.name == "fig2") {
      rep = experiments::run_fig2(dir, {a.runs, a.seed, a.threads});
    } else if (a.name == "fig3") {
      rep = experiments::run_fig3(dir, {a.runs, a.seed, a.threads});
    } else if (a.name == "perturbed") {
      rep = experiments::run_perturbed(dir);
    } else {
      experiments::CorpusOptions co;
      if (sub.count("--samples")) {
        co.geometry_samples = co.oracle_samples = co.jump_samples = a.samples;
        co.splay_points = std::min<std::size_t>(a.samples, co.splay_points);
      }
      co.sim_runs = a.runs;
      co.seed = a.seed;
      co.threads = a.threads;
      rep = experiments::run_property_corpus(dir, co);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  out << rep.to_text();
  out << "summary       " << (dir / "summary.json").string() << "\n";
  return rep.passed() ? kOk : kFailure;
}

int cmd_closeness(const std::string& a, const std::string& b, double tau, std::ostream& out, std::ostream& err) {
  try {
    const HybridArc arc_a = io::read_trajectory_csv(fs::path(a));
    const HybridArc arc_b = io::read_trajectory_csv(fs::path(b));
    const ClosenessReport r = closeness(arc_a, arc_b, tau);
    out << "tau           " << g12(r.tau) << "\n";
    out << "epsilon_star  " << g12(r.epsilon_star) << "\n";
    out << "witness       arc " << r.witness_arc << " at (t=" << g12(r.witness.t) << ", j=" << r.witness.j << ")\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pulse-coupled oscillator simulator and analysis toolkit", "pco"};
  app.require_subcommand(1);
  app.footer(std::string("Output directory defaults to $") + kOutDirEnv + " (else ./pco-out).");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation and write trajectory CSVs");
  simulate->add_option("config", sim.config, "JSON config file (schema pco-sim/1)");
  simulate->add_option("--n", sim.n, "Number of oscillators");
  simulate->add_option("--prc", sim.prc, "PRC spec: standard | linear:<c> | table:<csv>");
  simulate->add_option("--x0", sim.x0, "Initial phases, comma separated");
  simulate->add_option("--omega", sim.omega, "Natural frequency");
  simulate->add_option("--horizon", sim.horizon, "Flow time horizon");
  simulate->add_option("--epsilon", sim.epsilon, "Sinusoidal perturbation amplitude");
  simulate->add_option("--frequency", sim.frequency, "Sinusoidal perturbation frequency");
  simulate->add_option("--policy", sim.policy, "Simultaneous firing: all-zero | enumerate");
  simulate->add_option("--seed", sim.seed, "Seed for random x0 and branch choice");
  simulate->add_option("--sample-dt", sim.sample_dt, "Flow sampling period");
  simulate->add_option("--max-jumps", sim.max_jumps, "Jump budget");
  simulate->add_flag("--no-stop", sim.no_stop, "Run to the horizon (disable the stop rule)");
  simulate->add_flag("--allow-invalid-prc", sim.allow_invalid, "Run even if the PRC fails validation");
  simulate->add_option("--out", sim.out, "Output directory");

  std::string prc_spec;
  std::size_t prc_n = 3;
  std::size_t grid = ValidationOptions{}.grid;
  double lipschitz = ValidationOptions{}.lipschitz;
  CLI::App* validate = app.add_subcommand("validate-prc", "Check a PRC against the sector conditions");
  validate->add_option("--prc", prc_spec, "PRC spec: standard | linear:<c> | table:<csv>")->required();
  validate->add_option("--n", prc_n, "Number of oscillators")->check(CLI::Range(2, 1000000));
  validate->add_option("--grid", grid, "Grid resolution (>= 10000)");
  validate->add_option("--lipschitz", lipschitz, "Increment bound for the continuity check");

  ExperimentArgs ex;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a named scenario and its assertions");
  experiment->add_option("name", ex.name, "fig2 | fig3 | perturbed | corpus")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "perturbed", "corpus"}));
  experiment->add_option("--out", ex.out, "Output directory");
  experiment->add_option("--samples", ex.samples, "corpus: samples per geometry/jump property");
  experiment->add_option("--runs", ex.runs, "Random starts per corpus");
  experiment->add_option("--seed", ex.seed, "Scenario seed");
  experiment->add_option("--threads", ex.threads, "Worker threads (0 = hardware)");

  std::string arc_a, arc_b;
  double tau = 40.0;
  CLI::App* close = app.add_subcommand("closeness", "Measure (tau, eps)-closeness of two trajectory CSVs");
  close->add_option("a", arc_a, "First trajectory CSV")->required();
  close->add_option("b", arc_b, "Second trajectory CSV")->required();
  close->add_option("--tau", tau, "Hybrid time bound t + j <= tau");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  if (simulate->parsed()) return cmd_simulate(sim, *simulate, out, err);
  if (validate->parsed()) return cmd_validate(prc_spec, prc_n, grid, lipschitz, out, err);
  if (experiment->parsed()) return cmd_experiment(ex, *experiment, out, err);
  return cmd_closeness(arc_a, arc_b, tau, out, err);
}

}  // namespace pco::cli
