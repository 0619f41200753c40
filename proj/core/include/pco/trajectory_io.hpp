#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "pco/sim.hpp"

namespace pco::io {

/// Input does not follow a CSV schema below.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the same double.
std::string format_real(double v);

/// Trajectory CSV: `t,j,x_1,...,x_n,V,Vtilde,event`, one row per sample,
/// event in {flow, pre-jump, post-jump}.
void write_trajectory_csv(const HybridArc& arc, std::ostream& out);
void write_trajectory_csv(const HybridArc& arc, const std::filesystem::path& path);

/// Jump log CSV: `t,j,firers,branch,pre_1..n,post_1..n`. Firers are 1-based
/// indices joined by ';'. j is the jump index of the pre-jump state.
void write_events_csv(const HybridArc& arc, std::ostream& out);
void write_events_csv(const HybridArc& arc, const std::filesystem::path& path);

/// Per-jump Lyapunov trace: `t,j,V_pre,V_post,dV,Vtilde_pre,Vtilde_post,dVtilde`.
void write_jump_trace_csv(const HybridArc& arc, std::ostream& out);
void write_jump_trace_csv(const HybridArc& arc, const std::filesystem::path& path);

/// Rebuilds an arc (samples, flow intervals, jump events) from a trajectory
/// CSV. Throws SchemaError on any deviation from the header or row format.
HybridArc read_trajectory_csv(std::istream& in);
HybridArc read_trajectory_csv(const std::filesystem::path& path);

}  // namespace pco::io
