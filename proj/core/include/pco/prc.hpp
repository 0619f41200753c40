#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pco/model.hpp"

namespace pco::prc {

/// Q(z) = 0 on [0, knee], Q(z) = -slope (z - knee) on (knee, 2pi], with
/// knee = 2pi(n-1)/n.
struct PiecewiseLinear {
  std::size_t n;
  double slope;

  double knee() const { return sector_knee(n); }
  double operator()(double z) const {
    const double k = knee();
    return z <= k ? 0.0 : -slope * (z - k);
  }
};

inline constexpr double kStandardSlope = 0.7;

/// Slope 7/10 member of the linear family, validated.
PhaseResponse standard(std::size_t n);

/// Validated linear member. Throws std::invalid_argument unless 0 < slope < 1.
PhaseResponse linear_family(std::size_t n, double slope);

/// Linear member for any slope, not validated. Used to force broken slopes
/// through the simulator.
PhaseResponse linear_unchecked(std::size_t n, double slope);

/// Piecewise-linear interpolation of (z, Q(z)) breakpoints. The breakpoints
/// must be strictly increasing in z and span exactly [0, 2pi] (endpoints are
/// accepted within 1e-9 and snapped).
PhaseResponse table(std::vector<std::pair<double, double>> breakpoints, std::size_t n,
                    std::string name = "table");

/// Reads `z,q` rows (optional header, '#' comments) and builds a table PRC.
PhaseResponse table_from_csv(const std::filesystem::path& path, std::size_t n);

/// Builds a PRC from a textual descriptor: `standard`, `linear:<c>` (also
/// `linear{<c>}`), or `table:<path>` (also `table{<path>}`). The result is
/// not validated and slopes outside (0, 1) are accepted, so a caller can
/// inspect broken candidates.
PhaseResponse from_spec(const std::string& spec, std::size_t n);

/// Deliberately broken responses for negative testing of the validator.
namespace broken {
PhaseResponse zero(std::size_t n);
PhaseResponse steep(std::size_t n, double slope = 1.5);
/// Constant -step just above the knee: discontinuous at the knee.
PhaseResponse step(std::size_t n, double step = 0.3);
}  // namespace broken

}  // namespace pco::prc
