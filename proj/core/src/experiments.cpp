#include "pco/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pco/circle.hpp"
#include "pco/trajectory_io.hpp"

namespace pco::experiments {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string vec(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + num(x[i]);
  return s + ")";
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

void merge(Report& into, const Report& from, const std::string& prefix) {
  for (const auto& c : from.checks) into.check(prefix + c.name, c.passed, c.detail);
  for (const auto& [k, v] : from.metrics) into.metric(prefix + k, v);
  for (const auto& f : from.files) into.files.push_back(f);
}

double min_geodesic_at_jumps(const HybridArc& arc) {
  double best = std::numeric_limits<double>::infinity();
  for (const Sample& s : arc.samples) {
    if (s.kind != SampleKind::Flow) best = std::min(best, min_pairwise_geodesic(s.x));
  }
  return best;
}

std::size_t vtilde_rises(const HybridArc& arc, double margin) {
  std::size_t count = 0;
  for (const JumpEvent& e : arc.events) {
    if (vtilde(e.post) > vtilde(e.pre) + margin) ++count;
  }
  return count;
}

std::string eps_label(double eps) { return "eps_" + num(eps); }

}  // namespace

// ---------------------------------------------------------------- Report

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void Report::check(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

void Report::metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }

const Check* Report::find_check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double Report::find_metric(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string Report::to_json() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["passed"] = passed();
  j["checks"] = ordered_json::array();
  for (const auto& c : checks) {
    j["checks"].push_back(ordered_json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["metrics"] = ordered_json::object();
  for (const auto& [k, v] : metrics) {
    if (std::isfinite(v)) {
      j["metrics"][k] = v;
    } else {
      j["metrics"][k] = num(v);
    }
  }
  j["files"] = files;
  return j.dump(2) + "\n";
}

void Report::write_json(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json();
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << scenario << ": " << (passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : checks) {
    os << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  for (const auto& [k, v] : metrics) os << "  " << k << " = " << num(v) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- scenarios

PhaseVector fig2_start() { return PhaseVector{5.5977, 6.0274, 3.4383}; }
PhaseVector perturbed_start() { return PhaseVector{0.0, 0.1, 0.2}; }

Scenario fig2_scenario() {
  Scenario s;
  s.name = "fig2";
  s.base.n = 3;
  s.base.omega = 1.0;
  s.base.prc = prc::standard(3);
  s.base.x0 = fig2_start();
  s.base.horizon = 80.0;
  s.random_starts = 100;
  s.seed = kDefaultSeed;
  s.expected = {"V monotone", "terminal V < 1e-6", "distinct phases at jumps"};
  return s;
}

Scenario perturbed_scenario() {
  Scenario s;
  s.name = "perturbed";
  s.base.n = 3;
  s.base.omega = 1.0;
  s.base.prc = prc::standard(3);
  s.base.x0 = perturbed_start();
  s.base.horizon = 140.0;
  s.base.stop = StopRule::horizon_only();
  s.sweep = {0.03, 0.05};
  s.seed = kDefaultSeed;
  s.expected = {"S(0) < 1e-6", "S increasing in eps", "closeness increasing in eps"};
  return s;
}

std::uint64_t derive_seed(std::uint64_t scenario_seed, std::uint64_t index) {
  // splitmix64 finaliser over the combined state.
  std::uint64_t z = scenario_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PhaseVector random_start(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::vector<double> v(n);
  while (true) {
    for (double& x : v) x = phase(rng);
    PhaseVector x(v);
    if (!in_bad_set(x)) return x;
  }
}

// ---------------------------------------------------------------- corpus

Report run_convergence_corpus(const std::filesystem::path& out_dir, const ConvergenceOptions& opts,
                              std::vector<RunSummary>* runs_out) {
  std::map<std::size_t, PhaseResponse> prcs;
  for (std::size_t n : opts.ns) prcs.emplace(n, opts.prc(n));

  const std::size_t total = opts.ns.size() * opts.runs_per_n;
  std::vector<RunSummary> runs(total);
  std::vector<std::string> errors(total);

  parallel_for(total, opts.threads, [&](std::size_t idx) {
    RunSummary& r = runs[idx];
    r.n = opts.ns[idx / opts.runs_per_n];
    r.index = idx % opts.runs_per_n;
    r.seed = derive_seed(derive_seed(opts.seed, r.n), r.index);
    std::mt19937_64 rng(r.seed);
    r.x0 = random_start(r.n, rng);

    SimConfig cfg;
    cfg.n = r.n;
    cfg.prc = prcs.at(r.n);
    cfg.x0 = r.x0;
    cfg.horizon = opts.horizon;
    cfg.seed = r.seed;
    cfg.allow_invalid_prc = opts.allow_invalid_prc;
    try {
      const HybridArc arc = run(cfg);
      const MonotoneVerdict verdict = verify_monotone(arc, opts.monotone_tol);
      r.termination = arc.termination;
      r.jumps = arc.events.size();
      r.terminal_v = lyapunov(arc.terminal_state());
      r.terminal_t = arc.terminal_time();
      r.monotone = verdict.passed;
      r.worst_jump_dv = arc.events.empty() ? 0.0 : verdict.worst_jump_increase;
      r.min_jump_geodesic = min_geodesic_at_jumps(arc);
      r.min_dwell = arc.min_dwell_after_first_jump();
      r.vtilde_increase = vtilde_rises(arc, 1e-9) > 0;
      if (opts.write_csv) {
        char name[64];
        std::snprintf(name, sizeof name, "n%zu/run_%03zu.csv", r.n, r.index);
        r.file = name;
        io::write_trajectory_csv(arc, out_dir / r.file);
      }
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  });

  Report rep;
  rep.scenario = "convergence-corpus";
  std::size_t converged = 0, monotone = 0, distinct = 0, dwell_ok = 0, clean = 0, rises = 0;
  std::string first_nonconverged, first_nonmonotone, first_merge, first_dwell, first_diag;
  double worst_v = 0.0, latest = 0.0, min_geo = std::numeric_limits<double>::infinity();
  double min_dwell = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const RunSummary& r = runs[idx];
    const std::string tag = "n=" + std::to_string(r.n) + " run " + std::to_string(r.index) + " x0=" + vec(r.x0);
    if (!errors[idx].empty()) {
      if (first_diag.empty()) first_diag = tag + ": " + errors[idx];
      continue;
    }
    const bool diag = r.termination == Termination::ZenoGuard || r.termination == Termination::InvalidJump;
    if (!diag) ++clean;
    else if (first_diag.empty()) first_diag = tag + ": " + to_string(r.termination);
    if (r.terminal_v < opts.v_target) ++converged;
    else if (first_nonconverged.empty()) first_nonconverged = tag + " terminal V=" + num(r.terminal_v);
    if (r.monotone) ++monotone;
    else if (first_nonmonotone.empty()) first_nonmonotone = tag + " worst dV=" + num(r.worst_jump_dv);
    if (r.min_jump_geodesic > 0.0) ++distinct;
    else if (first_merge.empty()) first_merge = tag;
    if (r.min_dwell > opts.min_dwell_floor) ++dwell_ok;
    else if (first_dwell.empty()) first_dwell = tag + " dwell=" + num(r.min_dwell);
    if (r.vtilde_increase) ++rises;
    worst_v = std::max(worst_v, r.terminal_v);
    latest = std::max(latest, r.terminal_t);
    min_geo = std::min(min_geo, r.min_jump_geodesic);
    min_dwell = std::min(min_dwell, r.min_dwell);
    if (!r.file.empty()) rep.files.push_back(r.file);
  }

  auto count_detail = [total](std::size_t ok, const std::string& witness) {
    std::string d = std::to_string(ok) + "/" + std::to_string(total);
    if (ok != total && !witness.empty()) d += "; first failure " + witness;
    return d;
  };
  rep.check("no diagnostics", clean == total, count_detail(clean, first_diag));
  rep.check("converged (terminal V < " + num(opts.v_target) + ")", converged == total,
            count_detail(converged, first_nonconverged));
  rep.check("V monotone", monotone == total, count_detail(monotone, first_nonmonotone));
  rep.check("distinct phases at jumps", distinct == total, count_detail(distinct, first_merge));
  rep.check("dwell after first jump > " + num(opts.min_dwell_floor), dwell_ok == total,
            count_detail(dwell_ok, first_dwell));
  rep.metric("runs", static_cast<double>(total));
  rep.metric("max_terminal_v", worst_v);
  rep.metric("max_terminal_t", latest);
  rep.metric("min_jump_geodesic", min_geo);
  rep.metric("min_dwell_after_first_jump", min_dwell);
  rep.metric("vtilde_increase_fraction", total ? static_cast<double>(rises) / static_cast<double>(total) : 0.0);

  if (runs_out) *runs_out = std::move(runs);
  return rep;
}

// ---------------------------------------------------------------- fig2 / fig3

Report run_fig2(const std::filesystem::path& out_dir, const Fig2Options& opts) {
  Report rep;
  rep.scenario = "fig2";
  const Scenario sc = fig2_scenario();
  const HybridArc arc = run(sc.base);
  const MonotoneVerdict verdict = verify_monotone(arc, 1e-9);
  const double v_end = lyapunov(arc.terminal_state());

  io::write_trajectory_csv(arc, out_dir / "trajectory.csv");
  io::write_events_csv(arc, out_dir / "events.csv");
  io::write_jump_trace_csv(arc, out_dir / "v_trace.csv");
  rep.files = {"trajectory.csv", "events.csv", "v_trace.csv"};

  rep.check("no diagnostics", !arc.diagnostic_failure(), to_string(arc.termination));
  rep.check("V constant on flows, nonincreasing at jumps (tol 1e-9)", verdict.passed, verdict.detail);
  rep.check("terminal V < 1e-6", v_end < 1e-6, "V=" + num(v_end) + " at t=" + num(arc.terminal_time()));
  rep.check("distinct phases at jumps", min_geodesic_at_jumps(arc) > 0.0,
            "min geodesic " + num(min_geodesic_at_jumps(arc)));
  rep.metric("initial_v", lyapunov(sc.base.x0));
  rep.metric("terminal_v", v_end);
  rep.metric("terminal_t", arc.terminal_time());
  rep.metric("jumps", static_cast<double>(arc.events.size()));
  rep.metric("worst_jump_dv", verdict.worst_jump_increase);
  rep.metric("worst_flow_oscillation", verdict.worst_flow_oscillation);
  rep.metric("min_dwell_after_first_jump", arc.min_dwell_after_first_jump());

  // Same start without the horizon cap: when V first drops below the target.
  SimConfig longer = sc.base;
  longer.horizon = 10.0 * sc.base.horizon;
  double reached = std::numeric_limits<double>::infinity();
  for (const JumpEvent& e : run(longer).events) {
    if (lyapunov(e.post) < 1e-6) {
      reached = e.time.t;
      break;
    }
  }
  rep.metric("first_t_v_below_1e-6", reached);

  // A synchronized start lies in the bad set and never spreads out.
  SimConfig sync = sc.base;
  sync.x0 = PhaseVector{1.0, 1.0, 1.0};
  const HybridArc sync_arc = run(sync);
  const PhaseVector& last = sync_arc.terminal_state();
  const bool still_sync = last[0] == last[1] && last[1] == last[2];
  const double sync_v = lyapunov(last);
  rep.check("bad-set start stays synchronized", still_sync && sync_v > 1.0,
            "terminal x=" + vec(last) + " V=" + num(sync_v));

  if (opts.corpus_runs > 0) {
    ConvergenceOptions co;
    co.ns = {3};
    co.runs_per_n = opts.corpus_runs;
    co.seed = opts.seed;
    co.threads = opts.threads;
    merge(rep, run_convergence_corpus(out_dir / "corpus", co), "corpus: ");
    for (std::size_t k = 3; k < rep.files.size(); ++k) rep.files[k] = "corpus/" + rep.files[k];
  }
  rep.write_json(out_dir / "summary.json");
  return rep;
}

Report run_fig3(const std::filesystem::path& out_dir, const Fig3Options& opts) {
  Report rep;
  rep.scenario = "fig3";
  const Scenario sc = fig2_scenario();
  const HybridArc arc = run(sc.base);
  io::write_trajectory_csv(arc, out_dir / "trajectory.csv");
  io::write_jump_trace_csv(arc, out_dir / "v_trace.csv");
  rep.files = {"trajectory.csv", "v_trace.csv"};

  double worst_rise = -std::numeric_limits<double>::infinity();
  HybridTime rise_at;
  for (const JumpEvent& e : arc.events) {
    const double d = vtilde(e.post) - vtilde(e.pre);
    if (d > worst_rise) {
      worst_rise = d;
      rise_at = e.time;
    }
  }
  const std::size_t rises = vtilde_rises(arc, 1e-9);
  const double end = vtilde(arc.terminal_state());
  rep.check("Vtilde rises across some jump (> 1e-9)", rises > 0,
            std::to_string(rises) + " rising jumps; largest " + num(worst_rise) + " at (t=" + num(rise_at.t) +
                ", j=" + std::to_string(rise_at.j) + ")");
  rep.check("terminal Vtilde < 1e-3", end < 1e-3, "Vtilde=" + num(end));
  rep.metric("vtilde_rising_jumps", static_cast<double>(rises));
  rep.metric("vtilde_largest_rise", worst_rise);
  rep.metric("terminal_vtilde", end);

  SimConfig splay = sc.base;
  splay.x0 = PhaseVector{0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0};
  splay.horizon = 20.0;
  splay.stop = StopRule::horizon_only();
  const HybridArc splay_arc = run(splay);
  double splay_max = 0.0;
  for (const Sample& s : splay_arc.samples) splay_max = std::max(splay_max, vtilde(s.x));
  rep.check("splay start keeps Vtilde ~ 0", splay_max < 1e-9, "max Vtilde " + num(splay_max));

  if (opts.corpus_runs > 0) {
    ConvergenceOptions co;
    co.ns = {3};
    co.runs_per_n = opts.corpus_runs;
    co.seed = opts.seed;
    co.threads = opts.threads;
    co.write_csv = false;
    const Report corpus = run_convergence_corpus(out_dir, co);
    rep.metric("corpus_runs", static_cast<double>(opts.corpus_runs));
    rep.metric("corpus_vtilde_increase_fraction", corpus.find_metric("vtilde_increase_fraction"));
  }
  rep.write_json(out_dir / "summary.json");
  return rep;
}

// ---------------------------------------------------------------- perturbed

Report run_perturbed(const std::filesystem::path& out_dir, const PerturbedOptions& opts) {
  Report rep;
  rep.scenario = "perturbed";
  const Scenario sc = perturbed_scenario();

  std::vector<double> eps{0.0};
  eps.insert(eps.end(), opts.epsilons.begin(), opts.epsilons.end());
  std::vector<HybridArc> arcs;
  std::vector<double> tails;
  for (double e : eps) {
    SimConfig cfg = sc.base;
    cfg.horizon = opts.horizon;
    cfg.sample_dt = opts.sample_dt;
    if (e > 0.0) cfg.perturbation = Perturbation::sinusoidal_balanced(e, opts.frequency, cfg.n);
    arcs.push_back(run(cfg));
    tails.push_back(tail_sup(arcs.back(), opts.horizon, opts.tail_fraction));
    const std::string file = e > 0.0 ? eps_label(e) + ".csv" : "nominal.csv";
    io::write_trajectory_csv(arcs.back(), out_dir / file);
    rep.files.push_back(file);
    rep.metric("S(" + num(e) + ")", tails.back());
    rep.check("no diagnostics at eps=" + num(e), !arcs.back().diagnostic_failure(),
              to_string(arcs.back().termination));
  }

  rep.check("S(0) < 1e-6", tails[0] < 1e-6, "S(0)=" + num(tails[0]));
  bool increasing = true;
  std::string chain = "S: " + num(tails[0]);
  for (std::size_t k = 1; k < tails.size(); ++k) {
    increasing = increasing && tails[k - 1] < tails[k];
    chain += " < " + num(tails[k]);
  }
  rep.check("S strictly increasing in eps", increasing, chain);

  std::vector<double> eps_star;
  std::string cchain = "eps*:";
  for (std::size_t k = 1; k < arcs.size(); ++k) {
    const ClosenessReport c = closeness(arcs[0], arcs[k], opts.tau);
    eps_star.push_back(c.epsilon_star);
    rep.metric("closeness(" + num(eps[k]) + ")", c.epsilon_star);
    cchain += " " + num(c.epsilon_star) + " (witness arc " + std::to_string(c.witness_arc) + " t=" +
              num(c.witness.t) + " j=" + std::to_string(c.witness.j) + ")";
  }
  for (double probe : opts.probe_taus) {
    for (std::size_t k = 1; k < arcs.size(); ++k) {
      rep.metric("closeness(" + num(eps[k]) + ", tau=" + num(probe) + ")",
                 closeness(arcs[0], arcs[k], probe).epsilon_star);
    }
  }
  bool cinc = true;
  for (std::size_t k = 1; k < eps_star.size(); ++k) cinc = cinc && eps_star[k - 1] < eps_star[k];
  rep.check("closeness to nominal grows with eps (tau=" + num(opts.tau) + ")", cinc && !eps_star.empty(), cchain);

  rep.write_json(out_dir / "summary.json");
  return rep;
}

// ---------------------------------------------------------------- property corpus

namespace {

struct Tally {
  std::size_t ok = 0;
  std::size_t total = 0;
  std::string witness;

  void add(bool pass, const std::function<std::string()>& describe) {
    ++total;
    if (pass) ++ok;
    else if (witness.empty()) witness = describe();
  }
  void report(Report& rep, const std::string& name) const {
    std::string d = std::to_string(ok) + "/" + std::to_string(total);
    if (!witness.empty()) d += "; witness " + witness;
    rep.check(name, ok == total, d);
  }
};

std::vector<double> random_phases(std::size_t n, std::mt19937_64& rng, bool lattice) {
  std::vector<double> v(n);
  if (lattice) {
    // Coarse lattice including 0 and 2pi: produces ties and identified endpoints.
    std::uniform_int_distribution<int> pick(0, static_cast<int>(2 * n));
    for (double& x : v) x = kTwoPi * pick(rng) / static_cast<double>(2 * n);
  } else {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (double& x : v) x = phase(rng);
  }
  return v;
}

double wrap(double v) {
  v = std::fmod(v, kTwoPi);
  if (v < 0.0) v += kTwoPi;
  return v;
}

void geometry_suite(Report& rep, std::size_t n, const CorpusOptions& opts) {
  std::mt19937_64 rng(derive_seed(opts.seed, 1000 + n));
  const std::string p = "geometry n=" + std::to_string(n) + ": ";
  const double cap = kTwoPi - kTwoPi / static_cast<double>(n);

  Tally oracle, arc_cap, perm, rot, tri, line_le_seg;
  for (std::size_t s = 0; s < opts.oracle_samples; ++s) {
    const auto x = random_phases(n, rng, s % 4 == 3);
    const double g = circle::shortest_arc_length(x);
    const double o = circle::shortest_arc_oracle(x);
    oracle.add(std::abs(g - o) <= 1e-12, [&] { return vec(x) + " gap=" + num(g) + " oracle=" + num(o); });

    auto shuffled = x;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const double gs = circle::shortest_arc_length(shuffled);
    perm.add(std::abs(gs - g) <= 1e-12, [&] { return vec(x); });

    const double c = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
    std::vector<double> rotated(n);
    for (std::size_t i = 0; i < n; ++i) rotated[i] = wrap(x[i] + c);
    const double gr = circle::shortest_arc_length(rotated);
    rot.add(std::abs(gr - g) <= 1e-12, [&] { return vec(x) + " rotated by " + num(c); });

    const double d01 = circle::geodesic(x[0], x[1]);
    const double b = random_phases(1, rng, false)[0];
    tri.add(d01 <= circle::geodesic(x[0], b) + circle::geodesic(b, x[1]) + 1e-12,
            [&] { return vec(x) + " via " + num(b); });

    line_le_seg.add(vtilde(x) <= distance_to_splay(x) + 1e-12, [&] { return vec(x); });
  }
  for (std::size_t s = 0; s < opts.geometry_samples; ++s) {
    const auto x = random_phases(n, rng, false);
    const double g = circle::shortest_arc_length(x);
    arc_cap.add(g >= 0.0 && g <= cap + 1e-12, [&] { return vec(x) + " gamma=" + num(g); });
  }
  oracle.report(rep, p + "gap formula matches arc enumeration (1e-12)");
  arc_cap.report(rep, p + "gamma <= 2pi - 2pi/n");
  perm.report(rep, p + "gamma permutation invariant");
  rot.report(rep, p + "gamma rotation invariant");
  tri.report(rep, p + "geodesic triangle inequality");
  line_le_seg.report(rep, p + "Vtilde <= distance to splay set");

  Tally splay_zero, splay_member, splay_dist, off_positive, off_member, off_dist;
  std::vector<double> offsets(n);
  for (std::size_t k = 0; k < n; ++k) offsets[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
  for (std::size_t s = 0; s < opts.splay_points; ++s) {
    const double c = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = wrap(offsets[i] + c);
    std::shuffle(v.begin(), v.end(), rng);
    const PhaseVector x(v);
    splay_zero.add(lyapunov(x) <= 1e-9, [&] { return vec(x) + " V=" + num(lyapunov(x)); });
    splay_member.add(in_splay_set(x, 1e-9), [&] { return vec(x); });
    splay_dist.add(distance_to_splay(x) <= 1e-9, [&] { return vec(x) + " d=" + num(distance_to_splay(x)); });
  }
  const double spacing = kTwoPi / static_cast<double>(n);
  std::size_t drawn = 0;
  while (drawn < opts.geometry_samples) {
    const PhaseVector x(random_phases(n, rng, false));
    const auto prof = circle::gap_profile(x);
    const bool off = std::any_of(prof.gaps.begin(), prof.gaps.end(),
                                 [&](double g) { return std::abs(g - spacing) > 1e-3; });
    if (!off) continue;
    ++drawn;
    off_positive.add(lyapunov(x) > 0.0, [&] { return vec(x); });
    off_member.add(!in_splay_set(x, 1e-9), [&] { return vec(x); });
    off_dist.add(distance_to_splay(x) > 0.0, [&] { return vec(x); });
  }
  splay_zero.report(rep, p + "V = 0 on constructed splay points (1e-9)");
  splay_member.report(rep, p + "constructed splay points in splay set");
  splay_dist.report(rep, p + "distance to splay set = 0 on splay points");
  off_positive.report(rep, p + "V > 0 off the splay set");
  off_member.report(rep, p + "non-splay points outside splay set");
  off_dist.report(rep, p + "distance to splay set > 0 off the splay set");
}

void jump_suite(Report& rep, std::size_t n, const PhaseResponse& q, const CorpusOptions& opts) {
  std::mt19937_64 rng(derive_seed(opts.seed, 2000 + n));
  const std::string p = "jump n=" + std::to_string(n) + ": ";
  const double knee = sector_knee(n);

  Tally in_c, firer_zero, leaves_d, flat_fixed, upper_band, distinct, v_nonincrease;
  std::uniform_int_distribution<std::size_t> who(0, n - 1);
  for (std::size_t s = 0; s < opts.jump_samples; ++s) {
    PhaseVector x = random_start(n, rng);
    const std::size_t k = who(rng);
    x[k] = kTwoPi;
    if (in_bad_set(x) || firing_indices(x).size() != 1) {
      --s;
      continue;
    }
    PhaseVector post;
    try {
      post = jump_map(x, q).front().post;
    } catch (const InvalidPhaseResponse& e) {
      in_c.add(false, [&] { return vec(x) + ": " + e.what(); });
      continue;
    }
    in_c.add(in_flow_set(post), [&] { return vec(x) + " -> " + vec(post); });
    firer_zero.add(post[k] == 0.0, [&] { return vec(x); });
    leaves_d.add(std::none_of(post.begin(), post.end(), [](double v) { return v == kTwoPi; }),
                 [&] { return vec(x) + " -> " + vec(post); });
    bool flat = true, band = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      if (x[i] <= knee) flat = flat && post[i] == x[i];
      else band = band && post[i] > knee && post[i] < x[i];
    }
    flat_fixed.add(flat, [&] { return vec(x) + " -> " + vec(post); });
    upper_band.add(band, [&] { return vec(x) + " -> " + vec(post); });
    distinct.add(min_pairwise_geodesic(post) > 0.0, [&] { return vec(x) + " -> " + vec(post); });
    v_nonincrease.add(lyapunov(post) <= lyapunov(x) + 1e-9, [&] {
      return vec(x) + " -> " + vec(post) + " dV=" + num(lyapunov(post) - lyapunov(x));
    });
  }
  in_c.report(rep, p + "post-jump state in [0, 2pi]^n");
  firer_zero.report(rep, p + "firer resets to 0");
  leaves_d.report(rep, p + "post-jump state leaves the jump set");
  flat_fixed.report(rep, p + "phases at or below the knee unchanged");
  upper_band.report(rep, p + "phases above the knee decrease and stay above it");
  distinct.report(rep, p + "distinct phases preserved");
  v_nonincrease.report(rep, p + "V nonincreasing across the jump");
}

}  // namespace

Report run_property_corpus(const std::filesystem::path& out_dir, const CorpusOptions& opts) {
  Report rep;
  rep.scenario = "property-corpus";
  for (std::size_t n = opts.n_min; n <= opts.n_max; ++n) geometry_suite(rep, n, opts);
  for (std::size_t n = opts.n_min; n <= opts.n_max; ++n) {
    const PhaseResponse q = opts.prc(n);
    if (!opts.allow_invalid_prc) {
      const ValidationReport vr = q.validation() ? *q.validation() : validate_prc(q.function(), n);
      rep.check("prc n=" + std::to_string(n) + ": " + q.name() + " passes validation", vr.passed(),
                vr.passed() ? std::string{} : vr.summary());
    }
    jump_suite(rep, n, q, opts);
  }

  if (opts.sim_runs > 0) {
    ConvergenceOptions co;
    co.ns = opts.sim_ns;
    co.runs_per_n = opts.sim_runs;
    co.seed = opts.seed;
    co.prc = opts.prc;
    co.allow_invalid_prc = opts.allow_invalid_prc;
    co.write_csv = opts.write_csv;
    co.threads = opts.threads;
    merge(rep, run_convergence_corpus(out_dir / "sim", co), "sim: ");
  }
  rep.metric("geometry_samples", static_cast<double>(opts.geometry_samples));
  rep.metric("oracle_samples", static_cast<double>(opts.oracle_samples));
  rep.metric("sim_runs", static_cast<double>(opts.sim_runs));
  rep.write_json(out_dir / "summary.json");
  return rep;
}

}  // namespace pco::experiments
