#include "pco/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "pco/analysis.hpp"

namespace pco {

Perturbation Perturbation::sinusoidal(double amplitude, double frequency, std::vector<double> offsets) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("perturbation amplitude must be finite and >= 0");
  }
  if (!std::isfinite(frequency)) throw std::invalid_argument("perturbation frequency must be finite");
  Perturbation p;
  p.kind_ = Kind::Sinusoidal;
  p.amplitude_ = amplitude;
  p.frequency_ = frequency;
  p.offsets_ = std::move(offsets);
  return p;
}

Perturbation Perturbation::sinusoidal_balanced(double amplitude, double frequency, std::size_t n) {
  std::vector<double> offsets(n);
  for (std::size_t k = 0; k < n; ++k) offsets[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
  return sinusoidal(amplitude, frequency, std::move(offsets));
}

Perturbation Perturbation::custom(Callable d, double bound) {
  if (!d) throw std::invalid_argument("custom perturbation is empty");
  if (!(bound >= 0.0)) throw std::invalid_argument("perturbation bound must be >= 0");
  Perturbation p;
  p.kind_ = Kind::Custom;
  p.custom_ = std::move(d);
  p.custom_bound_ = bound;
  return p;
}

double Perturbation::bound() const noexcept {
  switch (kind_) {
    case Kind::None: return 0.0;
    case Kind::Sinusoidal: return amplitude_ * std::sqrt(static_cast<double>(offsets_.size()));
    case Kind::Custom: return custom_bound_;
  }
  return 0.0;
}

void Perturbation::evaluate(double t, std::span<double> out) const {
  switch (kind_) {
    case Kind::None:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case Kind::Sinusoidal:
      if (out.size() != offsets_.size()) throw std::invalid_argument("perturbation offsets do not match n");
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = amplitude_ * std::sin(frequency_ * t + offsets_[i]);
      return;
    case Kind::Custom:
      custom_(t, out);
      return;
  }
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (n < 2) fail("n: a network needs at least two oscillators");
  if (!(omega > 0.0) || !std::isfinite(omega)) fail("omega: must be finite and > 0");
  if (!prc) fail("prc: missing phase response");
  if (prc.n() != n) fail("prc: built for n=" + std::to_string(prc.n()) + " but n=" + std::to_string(n));
  if (x0.size() != n) fail("x0: expected " + std::to_string(n) + " phases, got " + std::to_string(x0.size()));
  if (!in_flow_set(x0)) fail("x0: phases must lie in [0, 2pi]");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("horizon: must be finite and > 0");
  if (max_jumps < 1) fail("max_jumps: must be >= 1");
  if (!(firing_tol > 0.0 && firing_tol <= 1e-3)) fail("firing_tol: must lie in (0, 1e-3]");
  if (!(min_dwell >= 0.0)) fail("min_dwell: must be >= 0");
  if (!(sample_dt >= 0.0) || !std::isfinite(sample_dt)) fail("sample_dt: must be finite and >= 0");
  if (perturbation.kind() == Perturbation::Kind::Sinusoidal && perturbation.offsets().size() != n) {
    fail("perturbation: expected " + std::to_string(n) + " offsets");
  }
  if (!(perturbation.bound() < omega)) fail("perturbation: bound must stay below omega");
  if (stop.v_threshold && !(*stop.v_threshold > 0.0)) fail("stop.v_threshold: must be > 0");
  if (stop.splay_tol && !(*stop.splay_tol > 0.0)) fail("stop.splay_tol: must be > 0");
  if (!allow_invalid_prc) {
    if (!prc.validation()) fail("prc: '" + prc.name() + "' has not been validated");
    if (!prc.validation()->passed()) {
      fail("prc: '" + prc.name() + "' failed validation\n" + prc.validation()->summary());
    }
  }
}

const char* to_string(SampleKind k) {
  switch (k) {
    case SampleKind::Flow: return "flow";
    case SampleKind::PreJump: return "pre-jump";
    case SampleKind::PostJump: return "post-jump";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::MaxJumps: return "max-jumps";
    case Termination::StopRule: return "stop-rule";
    case Termination::ZenoGuard: return "zeno-guard";
    case Termination::InvalidJump: return "invalid-jump";
  }
  return "?";
}

std::string JumpEvent::branch_label() const {
  if (firers.size() <= 1) return "single";
  if (policy == SimultaneityPolicy::AllZero) return "all-zero";
  return "enumerate:" + std::to_string(kept);
}

double HybridArc::min_dwell_after_first_jump() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < events.size(); ++k) {
    best = std::min(best, events[k].time.t - events[k - 1].time.t);
  }
  return best;
}

namespace {

double max_phase(const PhaseVector& x) { return *std::max_element(x.begin(), x.end()); }

void snap_firers(PhaseVector& x, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= kTwoPi - tol) x[i] = kTwoPi;
  }
}

// First grid time k * dt strictly after t.
std::size_t next_grid_index(double t, double dt) {
  auto k = static_cast<std::size_t>(std::floor(t / dt)) + 1;
  while (static_cast<double>(k) * dt <= t) ++k;
  return k;
}

FlowSegment flow_nominal(const PhaseVector& x, double omega, double t0, double t_limit,
                         const FlowOptions& opts) {
  double to_fire = std::numeric_limits<double>::infinity();
  std::size_t leader = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dt = (kTwoPi - x[i]) / omega;
    if (dt < to_fire) {
      to_fire = dt;
      leader = i;
    }
  }

  FlowSegment seg;
  seg.fired = t0 + to_fire <= t_limit;
  const double elapsed = seg.fired ? to_fire : t_limit - t0;
  seg.t_end = seg.fired ? t0 + to_fire : t_limit;
  seg.x_end = x;
  for (std::size_t i = 0; i < x.size(); ++i) seg.x_end[i] = x[i] + omega * elapsed;
  if (seg.fired) {
    seg.x_end[leader] = kTwoPi;
    snap_firers(seg.x_end, opts.firing_tol);
  }

  if (opts.sample_dt > 0.0) {
    for (std::size_t k = next_grid_index(t0, opts.sample_dt);; ++k) {
      const double ts = static_cast<double>(k) * opts.sample_dt;
      if (ts >= seg.t_end) break;
      PhaseVector xs = x;
      for (std::size_t i = 0; i < x.size(); ++i) xs[i] = x[i] + omega * (ts - t0);
      seg.interior.emplace_back(ts, std::move(xs));
    }
  }
  return seg;
}

class PerturbedFlow {
 public:
  PerturbedFlow(double omega, const Perturbation& d, std::size_t n)
      : omega_(omega), d_(d), k1_(n), k2_(n), k4_(n) {}

  // Classical RK4 step. The vector field depends on t only, so k2 == k3.
  PhaseVector step(const PhaseVector& x, double t, double h) {
    rhs(t, k1_);
    rhs(t + 0.5 * h, k2_);
    rhs(t + h, k4_);
    PhaseVector y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = x[i] + h / 6.0 * (k1_[i] + 4.0 * k2_[i] + k4_[i]);
    }
    return y;
  }

 private:
  void rhs(double t, std::vector<double>& out) {
    d_.evaluate(t, out);
    for (double& v : out) v += omega_;
  }

  double omega_;
  const Perturbation& d_;
  std::vector<double> k1_, k2_, k4_;
};

FlowSegment flow_perturbed(const PhaseVector& x, double omega, const Perturbation& d, double t0,
                           double t_limit, const FlowOptions& opts) {
  PerturbedFlow flow(omega, d, x.size());
  const double estimate = (kTwoPi - max_phase(x)) / omega;
  const double h = std::clamp(estimate / 100.0, 1e-12, opts.max_step);

  FlowSegment seg;
  PhaseVector state = x;
  double t = t0;
  const bool sampling = opts.sample_dt > 0.0;
  std::size_t k = sampling ? next_grid_index(t0, opts.sample_dt) : 0;

  while (true) {
    double target = std::min(t + h, t_limit);
    bool at_sample = false;
    if (sampling) {
      const double ts = static_cast<double>(k) * opts.sample_dt;
      if (ts <= target) {
        target = ts;
        at_sample = true;
      }
    }
    const double step = target - t;
    PhaseVector next = flow.step(state, t, step);

    if (max_phase(next) >= kTwoPi) {
      double lo = 0.0;
      double hi = step;
      PhaseVector at_hi = std::move(next);
      for (int iter = 0; iter < 200 && max_phase(at_hi) - kTwoPi > 0.5 * opts.firing_tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        PhaseVector at_mid = flow.step(state, t, mid);
        if (max_phase(at_mid) >= kTwoPi) {
          hi = mid;
          at_hi = std::move(at_mid);
        } else {
          lo = mid;
        }
      }
      snap_firers(at_hi, opts.firing_tol);
      seg.t_end = t + hi;
      seg.x_end = std::move(at_hi);
      seg.fired = true;
      return seg;
    }

    state = std::move(next);
    t = target;
    if (at_sample && t < t_limit) {
      seg.interior.emplace_back(t, state);
      ++k;
    }
    if (t >= t_limit) {
      seg.t_end = t_limit;
      seg.x_end = std::move(state);
      seg.fired = false;
      return seg;
    }
  }
}

}  // namespace

FlowSegment flow_to_next_event(const PhaseVector& x, double omega, const Perturbation& d, double t0,
                               double t_limit, const FlowOptions& opts) {
  if (!(omega > 0.0)) throw std::invalid_argument("flow: omega must be > 0");
  if (!in_flow_set(x)) throw std::invalid_argument("flow: state outside [0, 2pi]^n");
  if (in_jump_set(x, opts.firing_tol)) throw std::invalid_argument("flow: state is in the jump set");
  if (!(t_limit >= t0)) throw std::invalid_argument("flow: t_limit precedes t0");
  return d.active() ? flow_perturbed(x, omega, d, t0, t_limit, opts)
                    : flow_nominal(x, omega, t0, t_limit, opts);
}

HybridArc run(const SimConfig& cfg) {
  cfg.validate();

  HybridArc arc;
  arc.n = cfg.n;
  arc.omega = cfg.omega;
  arc.perturbed = cfg.perturbation.active();

  std::mt19937_64 rng(cfg.seed);
  const double revolution = kTwoPi / cfg.omega;
  std::optional<double> below_since;

  // Appends a sample; returns true when the stop rule fires on it.
  auto record = [&](double t, std::size_t j, const PhaseVector& x, SampleKind kind) {
    arc.samples.push_back({{t, j}, x, kind});
    if (kind == SampleKind::PreJump) return false;
    if (cfg.stop.splay_tol && in_splay_set(x, *cfg.stop.splay_tol)) return true;
    if (cfg.stop.v_threshold) {
      if (lyapunov(x) < *cfg.stop.v_threshold) {
        if (!below_since) below_since = t;
        if (t - *below_since >= revolution) return true;
      } else {
        below_since.reset();
      }
    }
    return false;
  };

  PhaseVector x = cfg.x0;
  double t = 0.0;
  std::size_t j = 0;
  double interval_begin = 0.0;
  const FlowOptions flow_opts{cfg.firing_tol, cfg.sample_dt, 1e-3};

  bool done = false;
  if (in_jump_set(x, cfg.firing_tol)) {
    record(t, j, x, SampleKind::PreJump);
  } else if (record(t, j, x, SampleKind::Flow)) {
    arc.termination = Termination::StopRule;
    done = true;
  }

  while (!done) {
    if (in_jump_set(x, cfg.firing_tol)) {
      if (!arc.events.empty()) {
        const double dwell = t - arc.events.back().time.t;
        if (dwell < cfg.min_dwell) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "jumps at t=%.12g and t=%.12g separated by %.3g < min dwell %.3g",
                        arc.events.back().time.t, t, dwell, cfg.min_dwell);
          arc.termination = Termination::ZenoGuard;
          arc.diagnostic = buf;
          break;
        }
      }
      std::vector<JumpBranch> branches;
      try {
        branches = jump_map(x, cfg.prc, cfg.policy, cfg.firing_tol);
      } catch (const InvalidPhaseResponse& e) {
        arc.termination = Termination::InvalidJump;
        arc.diagnostic = e.what();
        break;
      }
      std::size_t pick = 0;
      if (branches.size() > 1) {
        std::uniform_int_distribution<std::size_t> choose(0, branches.size() - 1);
        pick = choose(rng);
      }
      JumpBranch& b = branches[pick];
      arc.events.push_back({{t, j}, b.firers, b.policy, b.kept, x, b.post});
      arc.intervals.push_back({interval_begin, t, j});
      ++j;
      interval_begin = t;
      x = std::move(b.post);
      if (record(t, j, x, SampleKind::PostJump)) {
        arc.termination = Termination::StopRule;
        break;
      }
      if (arc.events.size() >= cfg.max_jumps) {
        arc.termination = Termination::MaxJumps;
        break;
      }
      continue;
    }

    FlowSegment seg = flow_to_next_event(x, cfg.omega, cfg.perturbation, t, cfg.horizon, flow_opts);
    for (auto& [ts, xs] : seg.interior) {
      if (record(ts, j, xs, SampleKind::Flow)) {
        t = ts;
        x = std::move(xs);
        arc.termination = Termination::StopRule;
        done = true;
        break;
      }
    }
    if (done) break;
    t = seg.t_end;
    x = std::move(seg.x_end);
    if (seg.fired) {
      record(t, j, x, SampleKind::PreJump);
    } else {
      arc.termination = record(t, j, x, SampleKind::Flow) ? Termination::StopRule : Termination::Horizon;
      break;
    }
  }

  arc.intervals.push_back({interval_begin, t, j});
  return arc;
}

}  // namespace pco
