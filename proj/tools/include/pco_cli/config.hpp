#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pco/sim.hpp"

namespace pco::cli {

inline constexpr const char* kConfigSchema = "pco-sim/1";

/// Malformed config document or field. The message names the line (syntax
/// errors) or the JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulation settings as read from a config file, before the PRC is
/// resolved. Unset optionals fall back to defaults in build_config.
struct SimDraft {
  std::string name;
  std::optional<std::size_t> n;
  double omega = 1.0;
  std::string prc = "standard";
  std::optional<std::vector<double>> x0;
  double horizon = 80.0;
  std::size_t max_jumps = 1000000;
  double firing_tol = kDefaultFiringTol;
  double min_dwell = 1e-9;
  StopRule stop;
  SimultaneityPolicy policy = SimultaneityPolicy::AllZero;
  std::uint64_t seed = 1;
  double sample_dt = 0.01;
  double epsilon = 0.0;
  double frequency = 0.5;
  std::optional<std::vector<double>> offsets;
  bool allow_invalid_prc = false;
  std::optional<std::string> out;
};

SimDraft parse_config(std::string_view text, const std::string& origin = "<config>");
SimDraft load_config(const std::filesystem::path& path);

/// Resolves n, the PRC (validated), x0 and the perturbation. A missing x0 is
/// drawn from the seed outside the bad set. Throws ConfigError for settings
/// that cannot form a SimConfig; PRC validation failures are left to the
/// caller via config.prc.validation().
SimConfig build_config(const SimDraft& draft);

/// "0,2.1,4.2" -> {0, 2.1, 4.2}.
std::vector<double> parse_list(const std::string& text, const std::string& field);

}  // namespace pco::cli
