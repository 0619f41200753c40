#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pco/circle.hpp"

namespace pco {

inline constexpr double kDefaultFiringTol = 1e-9;
inline constexpr double kDefaultSplayTol = 1e-6;
inline constexpr double kDefaultBadSetTol = 1e-12;

/// State of an n-oscillator network, n >= 2. Entries are not range-checked
/// here so that membership in the flow set can be queried; see in_flow_set.
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(std::vector<double> phases);
  PhaseVector(std::initializer_list<double> phases);

  std::size_t size() const noexcept { return phases_.size(); }
  double operator[](std::size_t i) const { return phases_[i]; }
  double& operator[](std::size_t i) { return phases_[i]; }

  auto begin() const noexcept { return phases_.begin(); }
  auto end() const noexcept { return phases_.end(); }

  std::span<const double> span() const noexcept { return phases_; }
  operator std::span<const double>() const noexcept { return phases_; }
  const std::vector<double>& values() const noexcept { return phases_; }

  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

 private:
  std::vector<double> phases_;
};

/// Knee of the reset sector structure, 2pi(n-1)/n.
double sector_knee(std::size_t n);

enum class PrcCondition {
  Range,               // z + Q(z) in [0, 2pi]
  Continuity,          // |dQ| <= L dz between grid neighbours
  NonzeroAtFire,       // Q(2pi) != 0
  FlatBelowKnee,       // Q(z) == 0 on [0, knee]
  NegativeAboveKnee,   // Q(z) < 0 on (knee, 2pi]
  LowerBoundAboveKnee, // knee - z < Q(z) on (knee, 2pi]
  Monotone,            // z + Q(z) strictly increasing (injectivity surrogate)
};

const char* to_string(PrcCondition c);

struct PrcViolation {
  PrcCondition condition;
  double z;
  double q;
  std::size_t count;  // number of sampled points violating this condition
};

struct ValidationOptions {
  std::size_t grid = 100000;
  double lipschitz = 10.0;
};

/// Outcome of validate_prc. Each violated condition appears once, with the
/// first witness found. Points are visited in the order 2pi, knee, 0, then
/// the uniform grid ascending.
struct ValidationReport {
  std::size_t n = 0;
  std::size_t grid = 0;
  double lipschitz = 0.0;
  std::vector<PrcViolation> violations;

  bool passed() const noexcept { return violations.empty(); }
  bool violates(PrcCondition c) const noexcept;
  const PrcViolation* find(PrcCondition c) const noexcept;

  bool standing_range_ok() const noexcept { return !violates(PrcCondition::Range); }
  bool regularity_ok() const noexcept {
    return !violates(PrcCondition::Continuity) && !violates(PrcCondition::NonzeroAtFire);
  }
  bool sector_ok() const noexcept;

  std::string summary() const;
};

using PrcFunction = std::function<double(double)>;

ValidationReport validate_prc(const PrcFunction& q, std::size_t n,
                              const ValidationOptions& opts = {});

/// Phase response function Q with the network size it targets and, once
/// checked, its validation report. Evaluation must be side-effect free.
class PhaseResponse {
 public:
  PhaseResponse() = default;
  PhaseResponse(std::string name, PrcFunction q, std::size_t n);

  double operator()(double z) const { return q_(z); }

  const std::string& name() const noexcept { return name_; }
  std::size_t n() const noexcept { return n_; }
  const PrcFunction& function() const noexcept { return q_; }
  const std::optional<ValidationReport>& validation() const noexcept { return validation_; }
  bool is_valid() const noexcept { return validation_ && validation_->passed(); }

  /// Copy carrying a fresh validation report.
  PhaseResponse validated(const ValidationOptions& opts = {}) const;

  explicit operator bool() const noexcept { return static_cast<bool>(q_); }

 private:
  std::string name_;
  PrcFunction q_;
  std::size_t n_ = 0;
  std::optional<ValidationReport> validation_;
};

/// A jump produced a state outside [0, 2pi]^n.
class InvalidPhaseResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SimultaneityPolicy { AllZero, Enumerate };

const char* to_string(SimultaneityPolicy p);
SimultaneityPolicy parse_policy(const std::string& s);

/// One element of the (possibly set-valued) jump map.
///
/// Bit k of `kept` is set when firers[k] took the x + Q(x) = 2pi + Q(2pi)
/// branch instead of resetting to 0. It is always 0 for a single firer.
struct JumpBranch {
  std::vector<std::size_t> firers;
  SimultaneityPolicy policy = SimultaneityPolicy::AllZero;
  std::uint64_t kept = 0;
  PhaseVector post;
};

bool in_flow_set(const PhaseVector& x);
bool in_jump_set(const PhaseVector& x, double tol = kDefaultFiringTol);

/// Indices whose phase is 2pi within tol.
std::vector<std::size_t> firing_indices(const PhaseVector& x, double tol = kDefaultFiringTol);

/// Jump map. With one firer there is exactly one branch. With m > 1 firers,
/// AllZero yields the single branch resetting every firer, Enumerate yields
/// all 2^m branches with the all-reset branch first.
std::vector<JumpBranch> jump_map(const PhaseVector& x, const PhaseResponse& q,
                                 SimultaneityPolicy policy = SimultaneityPolicy::AllZero,
                                 double tol = kDefaultFiringTol);

/// Sorted successor geodesic distances all equal 2pi/n within tol.
bool in_splay_set(const PhaseVector& x, double tol = kDefaultSplayTol);

/// Some pair of phases coincides on the circle (geodesic <= tol).
bool in_bad_set(const PhaseVector& x, double tol = kDefaultBadSetTol);

double min_pairwise_geodesic(const PhaseVector& x);

}  // namespace pco
