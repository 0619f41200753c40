#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "pco/prc.hpp"

using namespace pco;

constexpr double kPi = std::numbers::pi;

TEST(StandardPrc, FrozenValues) {
  const auto q = prc::standard(3);
  EXPECT_EQ(q(4 * kPi / 3), 0.0);
  EXPECT_EQ(q(kPi), 0.0);
  EXPECT_NEAR(q(kTwoPi), -7 * kPi / 15, 1e-15);
  EXPECT_NEAR(q(kTwoPi), -1.46607657, 1e-8);
  EXPECT_TRUE(q.is_valid());
  EXPECT_EQ(q.name(), "standard");
}

TEST(StandardPrc, MatchesClosedFormOnGrid) {
  const auto q = prc::standard(3);
  const auto reference = [](double z) { return z <= 4 * kPi / 3 ? 0.0 : -7.0 / 10.0 * (z - 4 * kPi / 3); };
  for (int i = 0; i <= 10000; ++i) {
    const double z = kTwoPi * i / 10000.0;
    ASSERT_NEAR(q(z), reference(z), 1e-15) << "z=" << z;
  }
}

TEST(LinearFamily, OpenUnitIntervalValidates) {
  for (double c : {0.05, 0.3, 0.5, 0.7, 0.95}) {
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
      const auto q = prc::linear_family(n, c);
      EXPECT_TRUE(q.is_valid()) << "c=" << c << " n=" << n << ": " << q.validation()->summary();
    }
  }
}

TEST(LinearFamily, KneeAndEndpointForTwo) {
  const auto q = prc::linear_family(2, 0.7);
  EXPECT_EQ(q(kPi), 0.0);
  EXPECT_NEAR(q(kTwoPi), -0.7 * kPi, 1e-15);
}

TEST(LinearFamily, RejectsClosedBoundaries) {
  for (double c : {0.0, 1.0, 1.5, -0.2}) EXPECT_THROW(prc::linear_family(3, c), std::invalid_argument) << c;
}

TEST(LinearFamily, UnitSlopeFailsStrictLowerBound) {
  const auto r = validate_prc(prc::PiecewiseLinear{3, 1.0}, 3);
  ASSERT_TRUE(r.violates(PrcCondition::LowerBoundAboveKnee));
  EXPECT_EQ(r.find(PrcCondition::LowerBoundAboveKnee)->z, kTwoPi);
  EXPECT_TRUE(r.violates(PrcCondition::Monotone));
}

TEST(BrokenCatalog, EachFailsWithWitness) {
  const auto zero = validate_prc(prc::broken::zero(3).function(), 3);
  ASSERT_TRUE(zero.violates(PrcCondition::NonzeroAtFire));
  EXPECT_EQ(zero.find(PrcCondition::NonzeroAtFire)->z, kTwoPi);

  const auto steep = validate_prc(prc::broken::steep(3).function(), 3);
  ASSERT_TRUE(steep.violates(PrcCondition::LowerBoundAboveKnee));
  EXPECT_EQ(steep.find(PrcCondition::LowerBoundAboveKnee)->z, kTwoPi);
  EXPECT_NEAR(steep.find(PrcCondition::LowerBoundAboveKnee)->q, -kPi, 1e-12);
  EXPECT_TRUE(steep.violates(PrcCondition::Monotone));

  const auto step = validate_prc(prc::broken::step(3).function(), 3);
  ASSERT_TRUE(step.violates(PrcCondition::Continuity));
  EXPECT_NEAR(step.find(PrcCondition::Continuity)->z, 4 * kPi / 3, 1e-3);
}

TEST(Table, InterpolatesLinearly) {
  const double k = 4 * kPi / 3;
  const auto q = prc::table({{0.0, 0.0}, {k, 0.0}, {kTwoPi, -0.5 * (kTwoPi - k)}}, 3);
  EXPECT_EQ(q(1.0), 0.0);
  EXPECT_NEAR(q(0.5 * (k + kTwoPi)), -0.25 * (kTwoPi - k), 1e-12);
  EXPECT_TRUE(q.validated().is_valid());
}

TEST(Table, RejectsMalformedBreakpoints) {
  EXPECT_THROW(prc::table({{0.0, 0.0}}, 3), std::invalid_argument);
  EXPECT_THROW(prc::table({{0.0, 0.0}, {1.0, 0.0}}, 3), std::invalid_argument);
  EXPECT_THROW(prc::table({{0.0, 0.0}, {2.0, 0.0}, {2.0, 0.0}, {kTwoPi, -1.0}}, 3), std::invalid_argument);
}

TEST(Table, LoadsCsv) {
  const auto path = std::filesystem::temp_directory_path() / "pco_test_prc_table.csv";
  {
    std::ofstream out(path);
    out << "z,q\n# comment\n0,0\n3.141592653589793,0\n6.283185307179586,-2.2\n";
  }
  const auto q = prc::table_from_csv(path, 2);
  EXPECT_NEAR(q(kTwoPi), -2.2, 1e-15);
  EXPECT_TRUE(q.validated().is_valid());
  std::filesystem::remove(path);
}

TEST(FromSpec, ParsesFamilies) {
  EXPECT_EQ(prc::from_spec("standard", 3).name(), "standard");
  EXPECT_NEAR(prc::from_spec("linear:0.4", 3)(kTwoPi), -0.4 * kTwoPi / 3, 1e-15);
  EXPECT_NEAR(prc::from_spec("linear{0.4}", 3)(kTwoPi), -0.4 * kTwoPi / 3, 1e-15);
  EXPECT_NEAR(prc::from_spec("table:" PCO_TEST_DATA "/q4.csv", 4)(kTwoPi), -1.0, 1e-15);
  EXPECT_NEAR(prc::from_spec("table{" PCO_TEST_DATA "/q4.csv}", 4)(kTwoPi), -1.0, 1e-15);
  EXPECT_FALSE(prc::from_spec("linear:1.5", 3).validation().has_value());
  EXPECT_THROW(prc::from_spec("cubic", 3), std::invalid_argument);
  EXPECT_THROW(prc::from_spec("linear:abc", 3), std::invalid_argument);
}
