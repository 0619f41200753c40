#include "pco/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "pco/circle.hpp"

namespace pco {
namespace {

void require_state(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("need at least two phases");
  for (double v : x) {
    if (!(v >= 0.0 && v <= kTwoPi)) throw std::domain_error("phase outside [0, 2pi]");
  }
}

// Distance to the family {a 1_n + v_sigma}. The projection coefficient
// a = mean(x) - mean(offsets) does not depend on sigma, so neither does its
// clamped value; the residual is then minimised by the permutation that maps
// the k-th smallest phase to offset 2pi k / n (rearrangement inequality).
double distance_to_offset_lines(std::span<const double> x, bool clamp_to_box) {
  require_state(x);
  const std::size_t n = x.size();
  const double spacing = kTwoPi / static_cast<double>(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return x[l] < x[r]; });

  std::vector<double> offsets(n);
  for (std::size_t k = 0; k < n; ++k) offsets[order[k]] = spacing * static_cast<double>(k);

  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) a += x[i] - offsets[i];
  a /= static_cast<double>(n);
  if (clamp_to_box) a = std::clamp(a, 0.0, spacing);

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = x[i] - a - offsets[i];
    sq += r * r;
  }
  return std::sqrt(sq);
}

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

// Samples of each jump index occupy a contiguous run.
std::vector<Range> ranges_by_jump(const HybridArc& arc) {
  std::vector<Range> out;
  for (std::size_t k = 0; k < arc.samples.size(); ++k) {
    const std::size_t j = arc.samples[k].time.j;
    if (j >= out.size()) out.resize(j + 1, Range{k, k});
    if (out[j].begin == out[j].end) out[j].begin = k;
    out[j].end = k + 1;
  }
  return out;
}

double euclid(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

// min over u in [0, 1] of max(|t - s(u)|, |x - X(u)|) along one linear piece.
// Both terms are convex in u, so ternary search converges to the minimum.
double best_on_piece(double t, std::span<const double> x, const Sample& p, const Sample& q,
                     std::vector<double>& scratch) {
  auto cost = [&](double u) {
    const double s = p.time.t + u * (q.time.t - p.time.t);
    for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = p.x[i] + u * (q.x[i] - p.x[i]);
    return std::max(std::abs(t - s), euclid(x, scratch));
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 90; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (cost(m1) <= cost(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min({cost(0.5 * (lo + hi)), cost(0.0), cost(1.0)});
}

struct Binding {
  double value = 0.0;
  HybridTime at;
};

Binding one_direction(const HybridArc& src, const HybridArc& dst, double tau) {
  const std::vector<Range> ranges = ranges_by_jump(dst);
  std::vector<double> scratch(src.n);
  Binding worst;
  for (const Sample& s : src.samples) {
    const double t = s.time.t;
    const std::size_t j = s.time.j;
    if (t + static_cast<double>(j) > tau) continue;
    if (j >= ranges.size() || ranges[j].begin == ranges[j].end) {
      return {std::numeric_limits<double>::infinity(), s.time};
    }
    const Range r = ranges[j];
    const auto first = dst.samples.begin() + static_cast<std::ptrdiff_t>(r.begin);
    const auto last = dst.samples.begin() + static_cast<std::ptrdiff_t>(r.end);
    auto it = std::lower_bound(first, last, t, [](const Sample& a, double v) { return a.time.t < v; });
    std::size_t pivot = static_cast<std::size_t>(it - dst.samples.begin());
    if (pivot >= r.end) pivot = r.end - 1;

    double best = std::max(std::abs(t - dst.samples[pivot].time.t), euclid(s.x, dst.samples[pivot].x));
    // Once best cannot beat the running worst, this sample is irrelevant to the max.
    if (r.end - r.begin > 1 && best > worst.value) {
      // Pieces [k, k+1] expanding outward from the pivot until the time gap alone exceeds best.
      for (std::size_t k = pivot; k + 1 < r.end; ++k) {
        if (dst.samples[k].time.t - t >= best || best <= worst.value) break;
        best = std::min(best, best_on_piece(t, s.x, dst.samples[k], dst.samples[k + 1], scratch));
      }
      for (std::size_t k = pivot; k > r.begin; --k) {
        if (t - dst.samples[k].time.t >= best || best <= worst.value) break;
        best = std::min(best, best_on_piece(t, s.x, dst.samples[k - 1], dst.samples[k], scratch));
      }
    }
    if (best > worst.value) worst = {best, s.time};
  }
  return worst;
}

}  // namespace

double lyapunov(std::span<const double> x) {
  require_state(x);
  return std::max(0.0, sector_knee(x.size()) - circle::shortest_arc_length(x));
}

double distance_to_splay(std::span<const double> x) { return distance_to_offset_lines(x, true); }

double vtilde(std::span<const double> x) { return distance_to_offset_lines(x, false); }

LyapunovTrace lyapunov_trace(const HybridArc& arc) {
  LyapunovTrace trace;
  trace.values.reserve(arc.samples.size());
  for (const Sample& s : arc.samples) trace.values.push_back(lyapunov(s.x));
  for (const JumpEvent& e : arc.events) trace.jump_deltas.push_back(lyapunov(e.post) - lyapunov(e.pre));

  const std::vector<Range> ranges = ranges_by_jump(arc);
  trace.flow_oscillation.assign(ranges.size(), 0.0);
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    if (ranges[j].begin == ranges[j].end) continue;
    const double v0 = trace.values[ranges[j].begin];
    double osc = 0.0;
    for (std::size_t k = ranges[j].begin; k < ranges[j].end; ++k) osc = std::max(osc, std::abs(trace.values[k] - v0));
    trace.flow_oscillation[j] = osc;
  }
  return trace;
}

MonotoneVerdict verify_monotone(const HybridArc& arc, double tol) {
  MonotoneVerdict v;
  v.trace = lyapunov_trace(arc);
  v.flow_checked = !arc.perturbed;
  v.jump_enforced = !arc.perturbed;

  std::size_t worst_flow_j = 0;
  for (std::size_t j = 0; j < v.trace.flow_oscillation.size(); ++j) {
    if (v.trace.flow_oscillation[j] > v.worst_flow_oscillation) {
      v.worst_flow_oscillation = v.trace.flow_oscillation[j];
      worst_flow_j = j;
    }
  }
  std::size_t worst_jump = 0;
  for (std::size_t k = 0; k < v.trace.jump_deltas.size(); ++k) {
    if (v.trace.jump_deltas[k] > v.worst_jump_increase) {
      v.worst_jump_increase = v.trace.jump_deltas[k];
      worst_jump = k;
    }
  }

  const bool flow_bad = v.worst_flow_oscillation > tol;
  const bool jump_bad = !arc.events.empty() && v.worst_jump_increase > tol;
  v.passed = !(v.flow_checked && flow_bad) && !(v.jump_enforced && jump_bad);

  if (jump_bad || (!flow_bad && !arc.events.empty())) {
    v.witness = arc.events[worst_jump].time;
  } else {
    v.witness = HybridTime{arc.intervals.empty() ? 0.0 : arc.intervals[std::min(worst_flow_j, arc.intervals.size() - 1)].t_begin,
                           worst_flow_j};
  }

  char buf[200];
  std::snprintf(buf, sizeof buf, "worst jump dV=%.12g at (t=%.12g, j=%zu)%s; worst flow oscillation=%.12g%s",
                arc.events.empty() ? 0.0 : v.worst_jump_increase,
                arc.events.empty() ? 0.0 : arc.events[worst_jump].time.t,
                arc.events.empty() ? std::size_t{0} : arc.events[worst_jump].time.j,
                v.jump_enforced ? "" : " (informational)", v.worst_flow_oscillation,
                v.flow_checked ? "" : " (not checked)");
  v.detail = buf;
  return v;
}

ClosenessReport closeness(const HybridArc& a, const HybridArc& b, double tau) {
  if (a.n != b.n) throw std::invalid_argument("closeness: arcs have different n");
  if (!(tau >= 0.0)) throw std::invalid_argument("closeness: tau must be >= 0");
  const Binding ab = one_direction(a, b, tau);
  const Binding ba = one_direction(b, a, tau);
  ClosenessReport r;
  r.tau = tau;
  if (ab.value >= ba.value) {
    r.epsilon_star = ab.value;
    r.witness = ab.at;
    r.witness_arc = 1;
  } else {
    r.epsilon_star = ba.value;
    r.witness = ba.at;
    r.witness_arc = 2;
  }
  return r;
}

double tail_sup(const HybridArc& arc, double horizon, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("tail fraction must lie in (0, 1]");
  const double from = (1.0 - fraction) * horizon;
  double sup = -1.0;
  for (const Sample& s : arc.samples) {
    if (s.time.t >= from) sup = std::max(sup, lyapunov(s.x));
  }
  if (sup < 0.0) throw std::invalid_argument("arc has no samples in the tail window");
  return sup;
}

}  // namespace pco
