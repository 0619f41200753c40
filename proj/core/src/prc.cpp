#include "pco/prc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace pco::prc {
namespace {

std::string fmt_slope(double c) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", c);
  return buf;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// `head:arg` or `head{arg}`; returns false when `s` has neither form.
bool split_spec(const std::string& s, const std::string& head, std::string& arg) {
  if (s.rfind(head, 0) != 0 || s.size() <= head.size()) return false;
  const char open = s[head.size()];
  if (open == ':') {
    arg = s.substr(head.size() + 1);
    return true;
  }
  if (open == '{' && s.back() == '}') {
    arg = s.substr(head.size() + 1, s.size() - head.size() - 2);
    return true;
  }
  return false;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
  }
}

}  // namespace

PhaseResponse standard(std::size_t n) {
  return PhaseResponse("standard", PiecewiseLinear{n, kStandardSlope}, n).validated();
}

PhaseResponse linear_family(std::size_t n, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) {
    throw std::invalid_argument("linear PRC slope must lie in the open interval (0, 1), got " +
                                fmt_slope(slope));
  }
  return linear_unchecked(n, slope).validated();
}

PhaseResponse linear_unchecked(std::size_t n, double slope) {
  sector_knee(n);
  return PhaseResponse("linear:" + fmt_slope(slope), PiecewiseLinear{n, slope}, n);
}

PhaseResponse table(std::vector<std::pair<double, double>> pts, std::size_t n, std::string name) {
  if (pts.size() < 2) throw std::invalid_argument("PRC table needs at least two breakpoints");
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].first > pts[i - 1].first)) {
      throw std::invalid_argument("PRC table z values must be strictly increasing");
    }
  }
  if (std::abs(pts.front().first) > 1e-9 || std::abs(pts.back().first - kTwoPi) > 1e-9) {
    throw std::invalid_argument("PRC table must span [0, 2pi]");
  }
  pts.front().first = 0.0;
  pts.back().first = kTwoPi;
  auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(pts));
  auto q = [shared](double z) {
    const auto& t = *shared;
    if (z <= t.front().first) return t.front().second;
    if (z >= t.back().first) return t.back().second;
    auto hi = std::upper_bound(t.begin(), t.end(), z,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    if (z == lo->first) return lo->second;
    const double w = (z - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  };
  return PhaseResponse(std::move(name), std::move(q), n);
}

PhaseResponse table_from_csv(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open PRC table " + path.string());
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'z,q'");
    }
    const std::string a = trim(line.substr(0, comma));
    const std::string b = trim(line.substr(comma + 1));
    if (pts.empty() && !a.empty() && std::isalpha(static_cast<unsigned char>(a[0]))) continue;
    try {
      pts.emplace_back(parse_real(a, "z"), parse_real(b, "q"));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table(std::move(pts), n, "table:" + path.string());
}

PhaseResponse from_spec(const std::string& raw, std::size_t n) {
  const std::string spec = trim(raw);
  if (spec == "standard") {
    return PhaseResponse("standard", PiecewiseLinear{n, kStandardSlope}, n);
  }
  std::string arg;
  if (split_spec(spec, "linear", arg)) return linear_unchecked(n, parse_real(trim(arg), "slope"));
  if (split_spec(spec, "table", arg)) return table_from_csv(trim(arg), n);
  throw std::invalid_argument("unknown PRC '" + spec + "' (expected standard, linear:<c>, table:<path>)");
}

namespace broken {

PhaseResponse zero(std::size_t n) {
  return PhaseResponse("broken:zero", [](double) { return 0.0; }, n);
}

PhaseResponse steep(std::size_t n, double slope) { return linear_unchecked(n, slope); }

PhaseResponse step(std::size_t n, double step) {
  const double knee = sector_knee(n);
  return PhaseResponse("broken:step", [knee, step](double z) { return z <= knee ? 0.0 : -step; }, n);
}

}  // namespace broken
}  // namespace pco::prc
