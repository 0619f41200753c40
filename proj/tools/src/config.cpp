#include "pco_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pco/experiments.hpp"
#include "pco/prc.hpp"

namespace pco::cli {
namespace {

using json = nlohmann::json;

// Best-effort source line for a key, for error messages.
std::size_t line_of(std::string_view text, const std::string& key, std::size_t from = 0) {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = text.find(quoted, from);
  if (pos == std::string_view::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  Reader(std::string_view text, std::string origin, std::filesystem::path base)
      : text_(text), origin_(std::move(origin)), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::ostringstream os;
    os << origin_;
    if (const std::size_t line = line_of(text_, field.substr(field.rfind('/') + 1)); line > 0) os << ":" << line;
    os << ": field " << field << ": " << what;
    throw ConfigError(os.str());
  }

  void only(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path.empty() ? "/" : path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        fail(path + "/" + key, "unknown key");
      }
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  std::uint64_t unsigned_int(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
    return out;
  }

  std::optional<double> optional_number(const json& v, const std::string& path) const {
    if (v.is_null()) return std::nullopt;
    return number(v, path);
  }

  std::string prc(const json& v) const {
    if (v.is_string()) return v.get<std::string>();
    only(v, "/prc", {"family", "c", "path"});
    if (!v.contains("family")) fail("/prc/family", "missing");
    const std::string family = string(v["family"], "/prc/family");
    if (family == "standard") return "standard";
    if (family == "linear") {
      if (!v.contains("c")) fail("/prc/c", "missing for family linear");
      std::ostringstream os;
      os.precision(17);
      os << "linear:" << number(v["c"], "/prc/c");
      return os.str();
    }
    if (family == "table") {
      if (!v.contains("path")) fail("/prc/path", "missing for family table");
      std::filesystem::path p = string(v["path"], "/prc/path");
      if (p.is_relative() && !base_.empty()) p = base_ / p;
      return "table:" + p.string();
    }
    fail("/prc/family", "unknown family '" + family + "' (standard, linear, table)");
  }

 private:
  std::string_view text_;
  std::string origin_;
  std::filesystem::path base_;
};

SimDraft parse(std::string_view text, const std::string& origin, const std::filesystem::path& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  const Reader r(text, origin, base);
  r.only(doc, "", {"schema", "name", "n", "omega", "prc", "x0", "horizon", "max_jumps", "firing_tol",
                   "min_dwell", "stop", "policy", "seed", "sample_dt", "perturbation", "allow_invalid_prc",
                   "out"});
  if (!doc.contains("schema")) r.fail("/schema", std::string("missing; expected \"") + kConfigSchema + "\"");
  if (const std::string tag = r.string(doc["schema"], "/schema"); tag != kConfigSchema) {
    r.fail("/schema", "unsupported schema '" + tag + "'; expected " + kConfigSchema);
  }

  SimDraft d;
  for (const auto& [key, v] : doc.items()) {
    const std::string path = "/" + key;
    if (key == "schema") continue;
    if (key == "name") d.name = r.string(v, path);
    else if (key == "n") d.n = r.unsigned_int(v, path);
    else if (key == "omega") d.omega = r.number(v, path);
    else if (key == "prc") d.prc = r.prc(v);
    else if (key == "x0") d.x0 = r.numbers(v, path);
    else if (key == "horizon") d.horizon = r.number(v, path);
    else if (key == "max_jumps") d.max_jumps = r.unsigned_int(v, path);
    else if (key == "firing_tol") d.firing_tol = r.number(v, path);
    else if (key == "min_dwell") d.min_dwell = r.number(v, path);
    else if (key == "seed") d.seed = r.unsigned_int(v, path);
    else if (key == "sample_dt") d.sample_dt = r.number(v, path);
    else if (key == "allow_invalid_prc") d.allow_invalid_prc = r.boolean(v, path);
    else if (key == "out") d.out = r.string(v, path);
    else if (key == "policy") {
      try {
        d.policy = parse_policy(r.string(v, path));
      } catch (const std::invalid_argument& e) {
        r.fail(path, e.what());
      }
    } else if (key == "stop") {
      r.only(v, path, {"v_threshold", "splay_tol"});
      d.stop = StopRule::horizon_only();
      if (v.contains("v_threshold")) d.stop.v_threshold = r.optional_number(v["v_threshold"], "/stop/v_threshold");
      if (v.contains("splay_tol")) d.stop.splay_tol = r.optional_number(v["splay_tol"], "/stop/splay_tol");
    } else if (key == "perturbation") {
      r.only(v, path, {"kind", "epsilon", "frequency", "offsets"});
      const std::string kind = v.contains("kind") ? r.string(v["kind"], "/perturbation/kind") : "sinusoidal";
      if (kind == "none") continue;
      if (kind != "sinusoidal") r.fail("/perturbation/kind", "expected none or sinusoidal");
      if (v.contains("epsilon")) d.epsilon = r.number(v["epsilon"], "/perturbation/epsilon");
      if (v.contains("frequency")) d.frequency = r.number(v["frequency"], "/perturbation/frequency");
      if (v.contains("offsets")) d.offsets = r.numbers(v["offsets"], "/perturbation/offsets");
    }
  }
  return d;
}

}  // namespace

SimDraft parse_config(std::string_view text, const std::string& origin) { return parse(text, origin, {}); }

SimDraft load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string(), path.parent_path());
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) {
      throw ConfigError(field + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

SimConfig build_config(const SimDraft& d) {
  SimConfig c;
  if (d.n) {
    c.n = *d.n;
  } else if (d.x0) {
    c.n = d.x0->size();
  }
  if (c.n < 2) throw ConfigError("n: need at least 2 oscillators, got " + std::to_string(c.n));
  if (d.x0 && d.x0->size() != c.n) {
    throw ConfigError("x0: has " + std::to_string(d.x0->size()) + " entries but n = " + std::to_string(c.n));
  }
  c.omega = d.omega;
  try {
    c.prc = prc::from_spec(d.prc, c.n).validated();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("prc: ") + e.what());
  }
  try {
    if (d.x0) {
      c.x0 = PhaseVector(*d.x0);
    } else {
      std::mt19937_64 rng(experiments::derive_seed(d.seed, 0));
      c.x0 = experiments::random_start(c.n, rng);
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("x0: ") + e.what());
  }
  if (d.epsilon != 0.0) {
    if (d.offsets) {
      if (d.offsets->size() != c.n) throw ConfigError("perturbation.offsets: need n entries");
      c.perturbation = Perturbation::sinusoidal(d.epsilon, d.frequency, *d.offsets);
    } else {
      c.perturbation = Perturbation::sinusoidal_balanced(d.epsilon, d.frequency, c.n);
    }
  }
  c.horizon = d.horizon;
  c.max_jumps = d.max_jumps;
  c.firing_tol = d.firing_tol;
  c.min_dwell = d.min_dwell;
  c.stop = d.stop;
  c.policy = d.policy;
  c.seed = d.seed;
  c.sample_dt = d.sample_dt;
  c.allow_invalid_prc = d.allow_invalid_prc;
  return c;
}

}  // namespace pco::cli
