#include "pco/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pco::circle {
namespace {

void require_phase(double v) {
  if (!(v >= 0.0 && v <= kTwoPi)) {
    throw std::domain_error("phase " + std::to_string(v) + " outside [0, 2pi]");
  }
}

void require_phases(std::span<const double> x) {
  if (x.empty()) {
    throw std::invalid_argument("phase vector is empty");
  }
  for (double v : x) require_phase(v);
}

// Counterclockwise travel from `from` to `to`, in [0, 2pi).
double ccw_travel(double from, double to) {
  double d = to - from;
  if (d < 0.0) d += kTwoPi;
  if (d >= kTwoPi) d -= kTwoPi;
  return d;
}

}  // namespace

double geodesic(double a, double b) {
  require_phase(a);
  require_phase(b);
  const double d = std::abs(a - b);
  return std::min(d, kTwoPi - d);
}

GapProfile gap_profile(std::span<const double> x) {
  require_phases(x);
  GapProfile p;
  p.sorted.assign(x.begin(), x.end());
  std::sort(p.sorted.begin(), p.sorted.end());
  const std::size_t n = p.sorted.size();
  p.gaps.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    p.gaps[i] = p.sorted[i + 1] - p.sorted[i];
  }
  p.gaps[n - 1] = kTwoPi - p.sorted[n - 1] + p.sorted[0];
  return p;
}

double shortest_arc_length(std::span<const double> x) {
  const GapProfile p = gap_profile(x);
  const double widest = *std::max_element(p.gaps.begin(), p.gaps.end());
  return std::max(0.0, kTwoPi - widest);
}

double shortest_arc_oracle(std::span<const double> x) {
  require_phases(x);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  double best = std::numeric_limits<double>::infinity();
  for (double start : sorted) {
    double sweep = 0.0;
    for (double p : sorted) sweep = std::max(sweep, ccw_travel(start, p));
    best = std::min(best, sweep);
  }
  return best;
}

}  // namespace pco::circle
