#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pco/analysis.hpp"
#include "pco/circle.hpp"
#include "pco/prc.hpp"
#include "pco/sim.hpp"

using namespace pco;

namespace {

SimConfig nominal(PhaseVector x0, double horizon = 80.0) {
  SimConfig c;
  c.n = x0.size();
  c.prc = prc::standard(c.n);
  c.x0 = std::move(x0);
  c.horizon = horizon;
  return c;
}

// Exact solution of xdot = omega + eps sin(f t + o) from (t0, x0).
double sinusoid_flow(double x0, double omega, double eps, double f, double o, double t0, double t) {
  return x0 + omega * (t - t0) - eps / f * (std::cos(f * t + o) - std::cos(f * t0 + o));
}

}  // namespace

TEST(HybridTime, LexicographicOrder) {
  EXPECT_LT((HybridTime{1.0, 0}), (HybridTime{1.0, 1}));
  EXPECT_LT((HybridTime{1.0, 5}), (HybridTime{1.5, 0}));
}

TEST(Flow, NominalClosedForm) {
  const auto seg = flow_to_next_event(PhaseVector{1.0, 2.0, 3.0}, 1.0, Perturbation::none(), 0.0, 100.0);
  ASSERT_TRUE(seg.fired);
  EXPECT_DOUBLE_EQ(seg.t_end, kTwoPi - 3.0);
  EXPECT_EQ(seg.x_end[2], kTwoPi);
  EXPECT_DOUBLE_EQ(seg.x_end[0], kTwoPi - 2.0);
}

TEST(Flow, InteriorSamplesOnGlobalGrid) {
  FlowOptions opts;
  opts.sample_dt = 0.25;
  const auto seg = flow_to_next_event(PhaseVector{5.0, 1.0}, 2.0, Perturbation::none(), 0.1, 100.0, opts);
  ASSERT_FALSE(seg.interior.empty());
  EXPECT_DOUBLE_EQ(seg.interior.front().first, 0.25);
  for (const auto& [t, x] : seg.interior) {
    EXPECT_NEAR(std::remainder(t, 0.25), 0.0, 1e-12);
    EXPECT_NEAR(x[0], 5.0 + 2.0 * (t - 0.1), 1e-12);
    EXPECT_LT(t, seg.t_end);
  }
}

TEST(Flow, StopsAtLimitWithoutFiring) {
  const auto seg = flow_to_next_event(PhaseVector{1.0, 2.0}, 1.0, Perturbation::none(), 0.0, 0.5);
  EXPECT_FALSE(seg.fired);
  EXPECT_EQ(seg.t_end, 0.5);
  EXPECT_DOUBLE_EQ(seg.x_end[1], 2.5);
}

TEST(Flow, PerturbedMatchesExactSolution) {
  const double eps = 0.05, f = 0.5;
  const auto d = Perturbation::sinusoidal_balanced(eps, f, 3);
  const PhaseVector x0{0.0, 0.1, 0.2};
  const auto seg = flow_to_next_event(x0, 1.0, d, 0.0, 100.0);
  ASSERT_TRUE(seg.fired);
  // Reference firing time: bisection on the exact solution of the leader.
  std::size_t leader = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (seg.x_end[i] > seg.x_end[leader]) leader = i;
  }
  const double o = kTwoPi * static_cast<double>(leader) / 3.0;
  double lo = 0.0, hi = 10.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (sinusoid_flow(x0[leader], 1.0, eps, f, o, 0.0, mid) >= kTwoPi ? hi : lo) = mid;
  }
  EXPECT_NEAR(seg.t_end, hi, 1e-8);
  for (std::size_t i = 0; i < 3; ++i) {
    if (i == leader) continue;
    const double oi = kTwoPi * static_cast<double>(i) / 3.0;
    EXPECT_NEAR(seg.x_end[i], sinusoid_flow(x0[i], 1.0, eps, f, oi, 0.0, seg.t_end), 1e-8);
  }
  EXPECT_EQ(seg.x_end[leader], kTwoPi);
}

TEST(Flow, RejectsStateInJumpSet) {
  EXPECT_THROW(flow_to_next_event(PhaseVector{kTwoPi, 1.0}, 1.0, Perturbation::none(), 0.0, 1.0),
               std::invalid_argument);
}

TEST(Perturbation, BoundIsEuclideanNorm) {
  EXPECT_NEAR(Perturbation::sinusoidal_balanced(0.05, 0.5, 3).bound(), 0.05 * std::sqrt(3.0), 1e-15);
  EXPECT_EQ(Perturbation::none().bound(), 0.0);
}

TEST(Config, RejectsBadFields) {
  auto expect_field = [](SimConfig c, const std::string& field) {
    try {
      c.validate();
      FAIL() << "expected rejection of " << field;
    } catch (const std::invalid_argument& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field, 0), 0u) << e.what();
    }
  };
  const SimConfig good = nominal(PhaseVector{1.0, 2.0, 3.0});
  EXPECT_NO_THROW(good.validate());
  SimConfig c = good;
  c.omega = 0.0;
  expect_field(c, "omega");
  c = good;
  c.horizon = -1.0;
  expect_field(c, "horizon");
  c = good;
  c.max_jumps = 0;
  expect_field(c, "max_jumps");
  c = good;
  c.x0 = PhaseVector{1.0, 2.0};
  expect_field(c, "x0");
  c = good;
  c.x0 = PhaseVector{1.0, 2.0, 7.0};
  expect_field(c, "x0");
  c = good;
  c.prc = prc::broken::steep(3);
  expect_field(c, "prc");
  c = good;
  c.perturbation = Perturbation::sinusoidal_balanced(0.6, 0.5, 3);
  expect_field(c, "perturbation");
}

TEST(Run, StandardExampleIsWellFormed) {
  const HybridArc arc = run(nominal(PhaseVector{5.5977, 6.0274, 3.4383}));
  EXPECT_EQ(arc.termination, Termination::Horizon);
  ASSERT_FALSE(arc.events.empty());
  EXPECT_EQ(arc.samples.front().time, (HybridTime{0.0, 0}));
  EXPECT_EQ(arc.terminal_time(), 80.0);
  for (std::size_t k = 1; k < arc.samples.size(); ++k) {
    ASSERT_LE(arc.samples[k - 1].time, arc.samples[k].time);
  }
  const auto q = prc::standard(3);
  for (std::size_t k = 0; k < arc.events.size(); ++k) {
    const JumpEvent& e = arc.events[k];
    EXPECT_EQ(e.time.j, k);
    EXPECT_EQ(e.branch_label(), "single");
    ASSERT_EQ(e.firers.size(), 1u);
    EXPECT_EQ(e.post, jump_map(e.pre, q).front().post);
  }
  ASSERT_EQ(arc.intervals.size(), arc.events.size() + 1);
  for (std::size_t j = 0; j < arc.intervals.size(); ++j) EXPECT_EQ(arc.intervals[j].j, j);
  // Frozen against an independent event loop: V at the horizon.
  EXPECT_NEAR(lyapunov(arc.terminal_state()), 2.6702384263721513e-06, 1e-15);
  EXPECT_EQ(arc.events.size(), 39u);
}

TEST(Run, StopRuleEndsAfterSustainedConvergence) {
  const HybridArc arc = run(nominal(PhaseVector{5.5977, 6.0274, 3.4383}, 400.0));
  EXPECT_EQ(arc.termination, Termination::StopRule);
  EXPECT_LT(lyapunov(arc.terminal_state()), 1e-6);
  // V first drops below 1e-6 at the jump near t = 84.03.
  EXPECT_NEAR(arc.terminal_time(), 84.0315893233 + kTwoPi, 0.02);
}

TEST(Run, SplayStartStaysSplay) {
  SimConfig c = nominal(PhaseVector{0.0, kTwoPi / 3, 2 * kTwoPi / 3}, 40.0);
  c.stop = StopRule::horizon_only();
  const HybridArc arc = run(c);
  EXPECT_GT(arc.events.size(), 15u);
  for (const Sample& s : arc.samples) {
    for (double g : circle::gap_profile(s.x).gaps) ASSERT_NEAR(g, kTwoPi / 3, 1e-9);
  }
}

TEST(Run, SynchronizedStartStaysSynchronized) {
  SimConfig c = nominal(PhaseVector{1.0, 1.0, 1.0}, 40.0);
  const HybridArc arc = run(c);
  EXPECT_EQ(arc.termination, Termination::Horizon);
  for (const JumpEvent& e : arc.events) EXPECT_EQ(e.branch_label(), "all-zero");
  for (const Sample& s : arc.samples) {
    ASSERT_EQ(s.x[0], s.x[1]);
    ASSERT_EQ(s.x[1], s.x[2]);
  }
  EXPECT_DOUBLE_EQ(lyapunov(arc.terminal_state()), 4 * std::numbers::pi / 3);
}

TEST(Run, StartInJumpSetJumpsFirst) {
  const HybridArc arc = run(nominal(PhaseVector{kTwoPi, 1.0, 3.0}, 1.0));
  EXPECT_EQ(arc.samples.front().kind, SampleKind::PreJump);
  ASSERT_FALSE(arc.events.empty());
  EXPECT_EQ(arc.events.front().time, (HybridTime{0.0, 0}));
}

TEST(Run, DeterministicIncludingEnumerateBranches) {
  SimConfig c = nominal(PhaseVector{kTwoPi, kTwoPi, 1.0}, 30.0);
  c.policy = SimultaneityPolicy::Enumerate;
  c.seed = 42;
  const HybridArc a = run(c);
  const HybridArc b = run(c);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    ASSERT_EQ(a.samples[k].time, b.samples[k].time);
    ASSERT_EQ(a.samples[k].x, b.samples[k].x);
  }
  EXPECT_EQ(a.events.front().branch_label().rfind("enumerate:", 0), 0u);
}

TEST(Run, ZenoGuardTriggers) {
  // Above the knee, push phases to just below 2pi: the next firing follows
  // almost immediately.
  const double knee = sector_knee(3);
  SimConfig c = nominal(PhaseVector{0.5, 5.0, 6.0}, 40.0);
  c.prc = PhaseResponse("zeno", [knee](double z) { return z <= knee ? 0.0 : (kTwoPi - 1e-13) - z; }, 3);
  c.allow_invalid_prc = true;
  const HybridArc arc = run(c);
  EXPECT_EQ(arc.termination, Termination::ZenoGuard);
  EXPECT_TRUE(arc.diagnostic_failure());
  EXPECT_FALSE(arc.diagnostic.empty());
}

TEST(Run, OutOfRangeResponseEndsRun) {
  SimConfig c = nominal(PhaseVector{0.5, 5.5, 6.0}, 40.0);
  c.prc = PhaseResponse("up", [](double) { return 1.0; }, 3);
  c.allow_invalid_prc = true;
  const HybridArc arc = run(c);
  EXPECT_EQ(arc.termination, Termination::InvalidJump);
}

TEST(Run, MaxJumpsHonoured) {
  SimConfig c = nominal(PhaseVector{5.5977, 6.0274, 3.4383});
  c.max_jumps = 5;
  const HybridArc arc = run(c);
  EXPECT_EQ(arc.termination, Termination::MaxJumps);
  EXPECT_EQ(arc.events.size(), 5u);
}

TEST(Run, DwellTimesStayPositive) {
  const HybridArc arc = run(nominal(PhaseVector{5.5977, 6.0274, 3.4383}));
  EXPECT_GT(arc.min_dwell_after_first_jump(), 1.0);
}
