#include "pco/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "pco/analysis.hpp"

namespace pco::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw SchemaError("line " + std::to_string(lineno) + ": bad number '" + s + "'");
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(const HybridArc& arc, std::ostream& out) {
  out << "t,j";
  for (std::size_t i = 1; i <= arc.n; ++i) out << ",x_" << i;
  out << ",V,Vtilde,event\n";
  for (const Sample& s : arc.samples) {
    out << format_real(s.time.t) << ',' << s.time.j;
    for (double v : s.x) out << ',' << format_real(v);
    out << ',' << format_real(lyapunov(s.x)) << ',' << format_real(vtilde(s.x)) << ',' << to_string(s.kind)
        << '\n';
  }
}

void write_trajectory_csv(const HybridArc& arc, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_trajectory_csv(arc, out);
}

void write_events_csv(const HybridArc& arc, std::ostream& out) {
  out << "t,j,firers,branch";
  for (std::size_t i = 1; i <= arc.n; ++i) out << ",pre_" << i;
  for (std::size_t i = 1; i <= arc.n; ++i) out << ",post_" << i;
  out << '\n';
  for (const JumpEvent& e : arc.events) {
    out << format_real(e.time.t) << ',' << e.time.j << ',';
    for (std::size_t k = 0; k < e.firers.size(); ++k) out << (k ? ";" : "") << e.firers[k] + 1;
    out << ',' << e.branch_label();
    for (double v : e.pre) out << ',' << format_real(v);
    for (double v : e.post) out << ',' << format_real(v);
    out << '\n';
  }
}

void write_events_csv(const HybridArc& arc, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_events_csv(arc, out);
}

void write_jump_trace_csv(const HybridArc& arc, std::ostream& out) {
  out << "t,j,V_pre,V_post,dV,Vtilde_pre,Vtilde_post,dVtilde\n";
  for (const JumpEvent& e : arc.events) {
    const double v0 = lyapunov(e.pre), v1 = lyapunov(e.post);
    const double w0 = vtilde(e.pre), w1 = vtilde(e.post);
    out << format_real(e.time.t) << ',' << e.time.j << ',' << format_real(v0) << ',' << format_real(v1) << ','
        << format_real(v1 - v0) << ',' << format_real(w0) << ',' << format_real(w1) << ',' << format_real(w1 - w0)
        << '\n';
  }
}

void write_jump_trace_csv(const HybridArc& arc, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_jump_trace_csv(arc, out);
}

HybridArc read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');
  if (header.size() < 7 || header[0] != "t" || header[1] != "j") {
    throw SchemaError("header must start with t,j and hold at least two phases");
  }
  const std::size_t n = header.size() - 5;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[2 + i] != "x_" + std::to_string(i + 1)) {
      throw SchemaError("header column " + std::to_string(3 + i) + " should be x_" + std::to_string(i + 1));
    }
  }
  if (header[2 + n] != "V" || header[3 + n] != "Vtilde" || header[4 + n] != "event") {
    throw SchemaError("header must end with V,Vtilde,event");
  }

  HybridArc arc;
  arc.n = n;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw SchemaError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                        " columns, got " + std::to_string(cells.size()));
    }
    Sample s;
    s.time.t = parse_cell(cells[0], lineno);
    const double jv = parse_cell(cells[1], lineno);
    if (jv < 0 || jv != static_cast<double>(static_cast<std::size_t>(jv))) {
      throw SchemaError("line " + std::to_string(lineno) + ": j must be a nonnegative integer");
    }
    s.time.j = static_cast<std::size_t>(jv);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = parse_cell(cells[2 + i], lineno);
    s.x = PhaseVector(std::move(x));
    const std::string& kind = cells[4 + n];
    if (kind == "flow") {
      s.kind = SampleKind::Flow;
    } else if (kind == "pre-jump") {
      s.kind = SampleKind::PreJump;
    } else if (kind == "post-jump") {
      s.kind = SampleKind::PostJump;
    } else {
      throw SchemaError("line " + std::to_string(lineno) + ": unknown event '" + kind + "'");
    }
    if (!arc.samples.empty() && s.time < arc.samples.back().time) {
      throw SchemaError("line " + std::to_string(lineno) + ": hybrid time goes backwards");
    }
    arc.samples.push_back(std::move(s));
  }
  if (arc.samples.empty()) throw SchemaError("trajectory has no samples");

  double begin = arc.samples.front().time.t;
  for (std::size_t k = 1; k < arc.samples.size(); ++k) {
    const Sample& prev = arc.samples[k - 1];
    const Sample& cur = arc.samples[k];
    if (cur.time.j == prev.time.j) continue;
    if (cur.time.j != prev.time.j + 1) throw SchemaError("jump index skips at row " + std::to_string(k + 2));
    arc.intervals.push_back({begin, prev.time.t, prev.time.j});
    begin = cur.time.t;
    JumpEvent e;
    e.time = prev.time;
    e.pre = prev.x;
    e.post = cur.x;
    for (std::size_t i = 0; i < n; ++i) {
      if (prev.x[i] >= kTwoPi - 1e-9) e.firers.push_back(i);
    }
    arc.events.push_back(std::move(e));
  }
  arc.intervals.push_back({begin, arc.samples.back().time.t, arc.samples.back().time.j});
  return arc;
}

HybridArc read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  return read_trajectory_csv(in);
}

}  // namespace pco::io
