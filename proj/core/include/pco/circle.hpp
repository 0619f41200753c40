#pragma once

#include <numbers>
#include <span>
#include <vector>

namespace pco {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Circle geometry on phases in the closed interval [0, 2pi].
///
/// 0 and 2pi are distinct as state values but coincide on the circle; every
/// function here identifies them. Inputs outside [0, 2pi] throw
/// std::domain_error.
namespace circle {

/// Shortest angular distance between two phases, in [0, pi].
double geodesic(double a, double b);

/// Phases sorted ascending together with their circular successor gaps.
///
/// gaps[i] runs from sorted[i] to sorted[i + 1]; the last gap wraps from
/// sorted.back() through 2pi to sorted.front(). The gaps sum to 2pi.
struct GapProfile {
  std::vector<double> sorted;
  std::vector<double> gaps;
};

GapProfile gap_profile(std::span<const double> x);

/// Length of the shortest closed arc containing every phase of x:
/// 2pi minus the largest circular gap.
double shortest_arc_length(std::span<const double> x);

/// Independent reference for shortest_arc_length. Tries every sorted phase as
/// the clockwise endpoint of a candidate arc, sweeps counterclockwise to the
/// farthest phase, and keeps the shortest sweep. Quadratic; meant for tests
/// and the property corpus.
double shortest_arc_oracle(std::span<const double> x);

}  // namespace circle
}  // namespace pco
