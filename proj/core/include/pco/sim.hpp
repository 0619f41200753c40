#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pco/model.hpp"

namespace pco {

/// Hybrid time (t, j): continuous time and jump count, ordered
/// lexicographically.
struct HybridTime {
  double t = 0.0;
  std::size_t j = 0;

  friend auto operator<=>(const HybridTime&, const HybridTime&) = default;
};

/// Additive frequency perturbation d(t) in xdot = omega 1_n + d(t).
class Perturbation {
 public:
  enum class Kind { None, Sinusoidal, Custom };
  using Callable = std::function<void(double t, std::span<double> out)>;

  Perturbation() = default;

  static Perturbation none() { return {}; }
  /// d_i(t) = amplitude * sin(frequency * t + offsets[i]).
  static Perturbation sinusoidal(double amplitude, double frequency, std::vector<double> offsets);
  /// Offsets 2pi k / n, k = 0..n-1.
  static Perturbation sinusoidal_balanced(double amplitude, double frequency, std::size_t n);
  /// `bound` must dominate sup_t |d(t)| (Euclidean norm); it is not checked.
  static Perturbation custom(Callable d, double bound);

  Kind kind() const noexcept { return kind_; }
  bool active() const noexcept { return kind_ != Kind::None; }
  double amplitude() const noexcept { return amplitude_; }
  double frequency() const noexcept { return frequency_; }
  const std::vector<double>& offsets() const noexcept { return offsets_; }

  /// Declared bound on the Euclidean norm of d(t).
  double bound() const noexcept;

  void evaluate(double t, std::span<double> out) const;

 private:
  Kind kind_ = Kind::None;
  double amplitude_ = 0.0;
  double frequency_ = 0.0;
  std::vector<double> offsets_;
  Callable custom_;
  double custom_bound_ = 0.0;
};

struct StopRule {
  /// Stop once V stays below this for one revolution (2pi / omega).
  std::optional<double> v_threshold = 1e-6;
  /// Stop as soon as the state is in the splay set at this tolerance.
  std::optional<double> splay_tol;

  static StopRule horizon_only() { return StopRule{std::nullopt, std::nullopt}; }
};

struct SimConfig {
  std::size_t n = 3;
  double omega = 1.0;
  PhaseResponse prc;
  PhaseVector x0;
  Perturbation perturbation;
  double horizon = 80.0;
  std::size_t max_jumps = 1000000;
  double firing_tol = kDefaultFiringTol;
  /// Flow time between consecutive jumps (after the first) below which the
  /// run aborts as Zeno.
  double min_dwell = 1e-9;
  StopRule stop;
  SimultaneityPolicy policy = SimultaneityPolicy::AllZero;
  std::uint64_t seed = 1;
  /// Uniform flow sampling period; samples sit on the global grid k * sample_dt.
  double sample_dt = 0.01;
  /// Run even if the PRC is unvalidated or failed validation.
  bool allow_invalid_prc = false;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

enum class SampleKind { Flow, PreJump, PostJump };
const char* to_string(SampleKind k);

struct Sample {
  HybridTime time;
  PhaseVector x;
  SampleKind kind = SampleKind::Flow;
};

struct JumpEvent {
  /// Hybrid time of the pre-jump state; the post-jump state sits at (t, j + 1).
  HybridTime time;
  std::vector<std::size_t> firers;
  SimultaneityPolicy policy = SimultaneityPolicy::AllZero;
  std::uint64_t kept = 0;
  PhaseVector pre;
  PhaseVector post;

  /// "single", "all-zero", or "enumerate:<kept mask>".
  std::string branch_label() const;
};

struct FlowInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t j = 0;
};

enum class Termination { Horizon, MaxJumps, StopRule, ZenoGuard, InvalidJump };
const char* to_string(Termination t);

/// A solution on a hybrid time domain: samples in hybrid-time order, one
/// event per jump, and the flow intervals [t_j, t_{j+1}] x {j}.
struct HybridArc {
  std::size_t n = 0;
  double omega = 1.0;
  bool perturbed = false;
  std::vector<Sample> samples;
  std::vector<JumpEvent> events;
  std::vector<FlowInterval> intervals;
  Termination termination = Termination::Horizon;
  std::string diagnostic;

  bool diagnostic_failure() const noexcept {
    return termination == Termination::ZenoGuard || termination == Termination::InvalidJump;
  }
  const PhaseVector& terminal_state() const { return samples.back().x; }
  double terminal_time() const { return samples.back().time.t; }
  /// Smallest t_{j+1} - t_j over flow intervals bounded by two jumps,
  /// excluding the first; +inf when there are fewer than two such intervals.
  double min_dwell_after_first_jump() const;
};

struct FlowSegment {
  double t_end = 0.0;
  PhaseVector x_end;
  bool fired = false;
  /// Samples strictly inside (t0, t_end) on the sampling grid.
  std::vector<std::pair<double, PhaseVector>> interior;
};

struct FlowOptions {
  double firing_tol = kDefaultFiringTol;
  /// <= 0 disables interior sampling.
  double sample_dt = 0.0;
  /// Upper bound on the integration step for perturbed flows.
  double max_step = 1e-3;
};

/// Flows x from t0 until some phase reaches 2pi or t_limit, whichever is
/// first. Without perturbation the firing time is min_i (2pi - x_i) / omega in
/// closed form; with perturbation the flow is integrated (RK4) and the
/// crossing located by bisection. Crossing coordinates are set to exactly 2pi.
FlowSegment flow_to_next_event(const PhaseVector& x, double omega, const Perturbation& d,
                               double t0, double t_limit, const FlowOptions& opts = {});

HybridArc run(const SimConfig& config);

}  // namespace pco
