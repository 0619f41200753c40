#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "pco/analysis.hpp"
#include "pco/prc.hpp"
#include "pco/trajectory_io.hpp"

using namespace pco;

namespace {

HybridArc sample_arc() {
  SimConfig c;
  c.prc = prc::standard(3);
  c.x0 = PhaseVector{5.5977, 6.0274, 3.4383};
  c.horizon = 15.0;
  c.sample_dt = 0.1;
  return run(c);
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(FormatReal, RoundTrips) {
  for (double v : {kTwoPi, 0.1, 1e-300, 4.432153490, 0.0, 123456789.125}) {
    EXPECT_EQ(std::stod(io::format_real(v)), v) << io::format_real(v);
  }
  EXPECT_EQ(io::format_real(0.5), "0.5");
}

TEST(TrajectoryCsv, HeaderAndRowCount) {
  const HybridArc arc = sample_arc();
  std::ostringstream os;
  io::write_trajectory_csv(arc, os);
  const std::string text = os.str();
  EXPECT_EQ(first_line(text), "t,j,x_1,x_2,x_3,V,Vtilde,event");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), arc.samples.size() + 1);
}

TEST(TrajectoryCsv, RoundTripPreservesArc) {
  const HybridArc arc = sample_arc();
  std::stringstream ss;
  io::write_trajectory_csv(arc, ss);
  const HybridArc back = io::read_trajectory_csv(ss);
  ASSERT_EQ(back.n, arc.n);
  ASSERT_EQ(back.samples.size(), arc.samples.size());
  for (std::size_t k = 0; k < arc.samples.size(); ++k) {
    ASSERT_EQ(back.samples[k].time, arc.samples[k].time);
    ASSERT_EQ(back.samples[k].x, arc.samples[k].x);
    ASSERT_EQ(back.samples[k].kind, arc.samples[k].kind);
  }
  ASSERT_EQ(back.events.size(), arc.events.size());
  for (std::size_t k = 0; k < arc.events.size(); ++k) {
    EXPECT_EQ(back.events[k].firers, arc.events[k].firers);
    EXPECT_EQ(back.events[k].post, arc.events[k].post);
  }
  EXPECT_EQ(back.intervals.size(), arc.intervals.size());
  EXPECT_EQ(closeness(arc, back, 40.0).epsilon_star, 0.0);
  EXPECT_TRUE(verify_monotone(back).passed);
}

TEST(EventsCsv, Format) {
  const HybridArc arc = sample_arc();
  std::ostringstream os;
  io::write_events_csv(arc, os);
  const std::string text = os.str();
  EXPECT_EQ(first_line(text), "t,j,firers,branch,pre_1,pre_2,pre_3,post_1,post_2,post_3");
  const std::string row = first_line(text.substr(text.find('\n') + 1));
  // The second oscillator starts closest to 2pi and fires first.
  EXPECT_NE(row.find(",2,single,"), std::string::npos) << row;
}

TEST(JumpTraceCsv, Format) {
  const HybridArc arc = sample_arc();
  std::ostringstream os;
  io::write_jump_trace_csv(arc, os);
  EXPECT_EQ(first_line(os.str()), "t,j,V_pre,V_post,dV,Vtilde_pre,Vtilde_post,dVtilde");
}

TEST(TrajectoryCsv, SchemaErrors) {
  const auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return io::read_trajectory_csv(is);
  };
  const std::string header = "t,j,x_1,x_2,V,Vtilde,event\n";
  EXPECT_THROW(parse(""), io::SchemaError);
  EXPECT_THROW(parse("t,j,x_1,V,Vtilde,event\n0,0,1,0,0,flow\n"), io::SchemaError);
  EXPECT_THROW(parse("time,j,x_1,x_2,V,Vtilde,event\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "0,0,1,2,0,0\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "0,0,1,abc,0,0,flow\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "0,0.5,1,2,0,0,flow\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "0,0,1,2,0,0,bounce\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "1,0,1,2,0,0,flow\n0.5,0,1.5,2.5,0,0,flow\n"), io::SchemaError);
  EXPECT_NO_THROW(parse(header + "0,0,1,2,0,0,flow\n1,0,2,3,0,0,flow\n"));
}
