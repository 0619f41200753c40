#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pco/sim.hpp"

namespace pco {

/// V(x) = 2pi(n-1)/n - gamma(x). Zero exactly on the splay set, at most
/// 2pi(n-1)/n.
double lyapunov(std::span<const double> x);

/// Euclidean distance from x to the splay set, viewed as the union of the n!
/// segments {a 1_n + v_sigma} within [0, 2pi]^n where v_sigma permutes the
/// offsets (0, 2pi/n, ..., 2pi(n-1)/n).
double distance_to_splay(std::span<const double> x);

/// Distance from x to the union of the unclamped lines {a 1_n + v_sigma},
/// the distance-like comparator that is not monotone along solutions.
double vtilde(std::span<const double> x);

struct LyapunovTrace {
  /// V at every sample of the arc, in sample order.
  std::vector<double> values;
  /// V(post) - V(pre) for each jump event.
  std::vector<double> jump_deltas;
  /// max |V - V(interval start)| over each flow interval.
  std::vector<double> flow_oscillation;
};

LyapunovTrace lyapunov_trace(const HybridArc& arc);

struct MonotoneVerdict {
  bool passed = true;
  /// Flow constancy is only checked on nominal arcs.
  bool flow_checked = true;
  /// On perturbed arcs jump increases are reported but do not fail the verdict.
  bool jump_enforced = true;
  double worst_flow_oscillation = 0.0;
  double worst_jump_increase = -std::numeric_limits<double>::infinity();
  /// Hybrid time of the worst offender (jump pre-time or flow sample).
  HybridTime witness;
  std::string detail;
  LyapunovTrace trace;
};

MonotoneVerdict verify_monotone(const HybridArc& arc, double tol = 1e-9);

struct ClosenessReport {
  double tau = 0.0;
  /// Infimum of eps for which the arcs are (tau, eps)-close on the recorded
  /// samples; +inf when a jump index of one arc has no counterpart.
  double epsilon_star = 0.0;
  /// Sample achieving the binding constraint and which arc it came from (1 or 2).
  HybridTime witness;
  int witness_arc = 0;
};

/// (tau, eps)-closeness measured on recorded samples, each flow interval
/// interpolated linearly between its samples.
ClosenessReport closeness(const HybridArc& a, const HybridArc& b, double tau);

/// sup of V over samples with t >= (1 - fraction) * horizon.
double tail_sup(const HybridArc& arc, double horizon, double fraction = 0.25);

}  // namespace pco
