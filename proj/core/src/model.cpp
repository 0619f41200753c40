#include "pco/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pco {

PhaseVector::PhaseVector(std::vector<double> phases) : phases_(std::move(phases)) {
  if (phases_.size() < 2) {
    throw std::invalid_argument("a network needs at least two oscillators");
  }
  for (double v : phases_) {
    if (!std::isfinite(v)) throw std::invalid_argument("phase is not finite");
  }
}

PhaseVector::PhaseVector(std::initializer_list<double> phases)
    : PhaseVector(std::vector<double>(phases)) {}

double sector_knee(std::size_t n) {
  if (n < 2) throw std::invalid_argument("network size must be at least 2");
  return kTwoPi * static_cast<double>(n - 1) / static_cast<double>(n);
}

const char* to_string(PrcCondition c) {
  switch (c) {
    case PrcCondition::Range: return "range";
    case PrcCondition::Continuity: return "continuity";
    case PrcCondition::NonzeroAtFire: return "nonzero-at-2pi";
    case PrcCondition::FlatBelowKnee: return "flat-below-knee";
    case PrcCondition::NegativeAboveKnee: return "negative-above-knee";
    case PrcCondition::LowerBoundAboveKnee: return "lower-bound-above-knee";
    case PrcCondition::Monotone: return "monotone";
  }
  return "?";
}

bool ValidationReport::violates(PrcCondition c) const noexcept { return find(c) != nullptr; }

const PrcViolation* ValidationReport::find(PrcCondition c) const noexcept {
  for (const auto& v : violations) {
    if (v.condition == c) return &v;
  }
  return nullptr;
}

bool ValidationReport::sector_ok() const noexcept {
  return !violates(PrcCondition::FlatBelowKnee) && !violates(PrcCondition::NegativeAboveKnee) &&
         !violates(PrcCondition::LowerBoundAboveKnee) && !violates(PrcCondition::Monotone);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "n=%zu grid=%zu lipschitz=%.12g: %s\n", n, grid, lipschitz,
                passed() ? "PASS" : "FAIL");
  os << buf;
  std::snprintf(buf, sizeof buf, "  standing range      %s\n", standing_range_ok() ? "ok" : "violated");
  os << buf;
  std::snprintf(buf, sizeof buf, "  continuity, Q(2pi)  %s\n", regularity_ok() ? "ok" : "violated");
  os << buf;
  std::snprintf(buf, sizeof buf, "  sector + injective  %s (strict monotonicity surrogate)\n",
                sector_ok() ? "ok" : "violated");
  os << buf;
  for (const auto& v : violations) {
    std::snprintf(buf, sizeof buf, "  violated %-22s witness z=%.12g Q(z)=%.12g (%zu points)\n",
                  to_string(v.condition), v.z, v.q, v.count);
    os << buf;
  }
  return os.str();
}

ValidationReport validate_prc(const PrcFunction& q, std::size_t n, const ValidationOptions& opts) {
  if (!q) throw std::invalid_argument("phase response function is empty");
  if (opts.grid < 10000) throw std::invalid_argument("validation grid needs at least 10^4 points");
  const double knee = sector_knee(n);

  ValidationReport report;
  report.n = n;
  report.grid = opts.grid;
  report.lipschitz = opts.lipschitz;

  auto flag = [&report](PrcCondition c, double z, double qz) {
    for (auto& v : report.violations) {
      if (v.condition == c) {
        ++v.count;
        return;
      }
    }
    report.violations.push_back({c, z, qz, 1});
  };

  auto check_point = [&](double z, double qz) {
    const double image = z + qz;
    if (!std::isfinite(qz) || image < 0.0 || image > kTwoPi) flag(PrcCondition::Range, z, qz);
    if (z <= knee) {
      if (qz != 0.0) flag(PrcCondition::FlatBelowKnee, z, qz);
    } else {
      if (!(qz < 0.0)) flag(PrcCondition::NegativeAboveKnee, z, qz);
      if (!(knee - z < qz)) flag(PrcCondition::LowerBoundAboveKnee, z, qz);
    }
  };

  const double q_fire = q(kTwoPi);
  if (q_fire == 0.0) flag(PrcCondition::NonzeroAtFire, kTwoPi, q_fire);
  check_point(kTwoPi, q_fire);
  check_point(knee, q(knee));
  check_point(0.0, q(0.0));

  std::vector<double> zs;
  zs.reserve(opts.grid + 2);
  for (std::size_t k = 0; k <= opts.grid; ++k) {
    zs.push_back(kTwoPi * static_cast<double>(k) / static_cast<double>(opts.grid));
  }
  zs.back() = kTwoPi;
  zs.push_back(knee);
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

  double prev_z = zs.front();
  double prev_q = q(prev_z);
  check_point(prev_z, prev_q);
  for (std::size_t k = 1; k < zs.size(); ++k) {
    const double z = zs[k];
    const double qz = q(z);
    check_point(z, qz);
    const double dz = z - prev_z;
    if (std::abs(qz - prev_q) > opts.lipschitz * dz) flag(PrcCondition::Continuity, z, qz);
    if (!(z + qz > prev_z + prev_q)) flag(PrcCondition::Monotone, z, qz);
    prev_z = z;
    prev_q = qz;
  }
  return report;
}

PhaseResponse::PhaseResponse(std::string name, PrcFunction q, std::size_t n)
    : name_(std::move(name)), q_(std::move(q)), n_(n) {
  if (!q_) throw std::invalid_argument("phase response function is empty");
  if (n_ < 2) throw std::invalid_argument("network size must be at least 2");
}

PhaseResponse PhaseResponse::validated(const ValidationOptions& opts) const {
  PhaseResponse copy = *this;
  copy.validation_ = validate_prc(q_, n_, opts);
  return copy;
}

const char* to_string(SimultaneityPolicy p) {
  return p == SimultaneityPolicy::AllZero ? "all-zero" : "enumerate";
}

SimultaneityPolicy parse_policy(const std::string& s) {
  if (s == "all-zero") return SimultaneityPolicy::AllZero;
  if (s == "enumerate") return SimultaneityPolicy::Enumerate;
  throw std::invalid_argument("unknown simultaneity policy '" + s + "'");
}

bool in_flow_set(const PhaseVector& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= kTwoPi; });
}

bool in_jump_set(const PhaseVector& x, double tol) {
  if (x.size() == 0) return false;
  const double top = *std::max_element(x.begin(), x.end());
  return std::abs(top - kTwoPi) <= tol;
}

std::vector<std::size_t> firing_indices(const PhaseVector& x, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - kTwoPi) <= tol) out.push_back(i);
  }
  return out;
}

std::vector<JumpBranch> jump_map(const PhaseVector& x, const PhaseResponse& q,
                                 SimultaneityPolicy policy, double tol) {
  if (!q) throw std::invalid_argument("jump_map: phase response is empty");
  if (!in_flow_set(x)) throw std::invalid_argument("jump_map: state outside [0, 2pi]^n");
  const std::vector<std::size_t> firers = firing_indices(x, tol);
  if (firers.empty()) throw std::invalid_argument("jump_map: no oscillator at 2pi");
  if (policy == SimultaneityPolicy::Enumerate && firers.size() > 20) {
    throw std::invalid_argument("jump_map: too many simultaneous firers to enumerate");
  }

  // Non-firers take x + Q(x) on every branch.
  PhaseVector base = x;
  std::vector<bool> is_firer(x.size(), false);
  for (std::size_t i : firers) is_firer[i] = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_firer[i]) continue;
    base[i] = x[i] + q(x[i]);
    if (!(base[i] >= 0.0 && base[i] <= kTwoPi)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "reset of x=%.12g lands at %.12g outside [0, 2pi]", x[i], base[i]);
      throw InvalidPhaseResponse(buf);
    }
  }
  const double kept_value = kTwoPi + q(kTwoPi);

  const bool enumerate = firers.size() > 1 && policy == SimultaneityPolicy::Enumerate;
  const std::uint64_t count = enumerate ? (std::uint64_t{1} << firers.size()) : 1;
  if (enumerate && !(kept_value >= 0.0 && kept_value <= kTwoPi)) {
    throw InvalidPhaseResponse("2pi + Q(2pi) lies outside [0, 2pi]");
  }

  std::vector<JumpBranch> branches;
  branches.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    JumpBranch b;
    b.firers = firers;
    b.policy = policy;
    b.kept = mask;
    b.post = base;
    for (std::size_t k = 0; k < firers.size(); ++k) {
      b.post[firers[k]] = (mask >> k) & 1u ? kept_value : 0.0;
    }
    branches.push_back(std::move(b));
  }
  return branches;
}

bool in_splay_set(const PhaseVector& x, double tol) {
  if (!in_flow_set(x)) return false;
  std::vector<double> y(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = y.size();
  const double spacing = kTwoPi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = circle::geodesic(y[i], y[(i + 1) % n]);
    if (std::abs(d - spacing) > tol) return false;
  }
  return true;
}

bool in_bad_set(const PhaseVector& x, double tol) {
  return min_pairwise_geodesic(x) <= tol;
}

double min_pairwise_geodesic(const PhaseVector& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      best = std::min(best, circle::geodesic(x[i], x[j]));
    }
  }
  return best;
}

}  // namespace pco
