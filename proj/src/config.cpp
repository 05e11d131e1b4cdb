#include "geqlab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace geq {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& s, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) fail(line, "malformed value for '" + key + "': " + s);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, "malformed value for '" + key + "': " + s);
  }
}

std::pair<double, double> parse_pair(const std::string& s, int line, const std::string& key) {
  std::istringstream in(s);
  double a, b;
  if (!(in >> a >> b)) fail(line, "'" + key + "' expects two numbers, got: " + s);
  std::string rest;
  if (in >> rest) fail(line, "'" + key + "' expects two numbers, got: " + s);
  return {a, b};
}

bool parse_bool(const std::string& s, int line, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(line, "'" + key + "' expects true or false, got: " + s);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  ModelConfig& mc = cfg.model;

  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  int section = -1;  // -1: top level, otherwise profile index (0-based)
  std::vector<int> section_lines;
  std::vector<bool> seen;
  bool dim_seen = false;

  while (std::getline(stream, raw)) {
    ++line;
    std::string s = raw;
    const std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      std::istringstream head(s.substr(1, s.size() - 2));
      std::string word;
      int idx = 0;
      if (!(head >> word >> idx) || word != "profile")
        fail(line, "expected [profile N], got " + s);
      if (!dim_seen) fail(line, "dim must be set before profile sections");
      if (idx < 1 || idx > mc.dim)
        fail(line, "profile index " + std::to_string(idx) + " out of range 1.." +
                       std::to_string(mc.dim));
      if (seen[idx - 1]) fail(line, "duplicate profile section [profile " + std::to_string(idx) + "]");
      seen[idx - 1] = true;
      section = idx - 1;
      section_lines[idx - 1] = line;
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value, got: " + s);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) fail(line, "expected key = value, got: " + s);

    if (section < 0) {
      if (key == "dim") {
        const double d = parse_double(val, line, key);
        if (d < 1 || d != std::floor(d)) fail(line, "dim must be >= 1");
        mc.dim = static_cast<int>(d);
        mc.profiles.resize(mc.dim);
        seen.assign(mc.dim, false);
        section_lines.assign(mc.dim, 0);
        dim_seen = true;
      } else if (key == "gbar") {
        std::istringstream in(val);
        std::string mode;
        in >> mode;
        if (mode == "lc") {
          mc.gbar_mode = "lc";
        } else if (mode == "proportional") {
          if (!(in >> mc.gbar_param)) fail(line, "gbar = proportional expects a factor");
          mc.gbar_mode = "proportional";
        } else if (mode == "flatten-rho") {
          if (!(in >> mc.gbar_index)) fail(line, "gbar = flatten-rho expects a 1-based index");
          mc.gbar_mode = "flatten-rho";
        } else {
          fail(line, "unknown gbar mode: " + mode);
        }
      } else {
        fail(line, "unknown key '" + key + "'");
      }
      continue;
    }

    ProfileConfig& pc = mc.profiles[section];
    if (key == "kind") {
      if (val != "sin" && val != "cos" && val != "affine" && val != "constant")
        fail(line, "unknown profile kind: " + val);
      pc.kind = val;
    } else if (key == "offset") {
      pc.offset = parse_double(val, line, key);
    } else if (key == "amplitude") {
      pc.amplitude = parse_double(val, line, key);
    } else if (key == "frequency") {
      pc.frequency = parse_double(val, line, key);
    } else if (key == "slope") {
      pc.slope = parse_double(val, line, key);
    } else if (key == "value") {
      pc.value = parse_double(val, line, key);
    } else if (key == "bounds") {
      std::tie(pc.bound_lo, pc.bound_hi) = parse_pair(val, line, key);
      if (!(pc.bound_hi > pc.bound_lo)) fail(line, "bounds must satisfy lo < hi");
    } else if (key == "periodic") {
      pc.periodic = parse_bool(val, line, key);
    } else if (key == "range") {
      std::tie(pc.range_lo, pc.range_hi) = parse_pair(val, line, key);
      pc.has_range = true;
    } else {
      fail(line, "unknown key '" + key + "' in profile section");
    }
  }

  if (!dim_seen) throw ConfigError("line 1: missing required key 'dim'");
  for (int i = 0; i < mc.dim; ++i) {
    if (!seen[i])
      throw ConfigError("line " + std::to_string(line) + ": missing section [profile " +
                        std::to_string(i + 1) + "]");
    if (mc.profiles[i].kind.empty())
      fail(section_lines[i], "profile " + std::to_string(i + 1) + " is missing 'kind'");
    if (mc.profiles[i].bound_hi == mc.profiles[i].bound_lo)
      fail(section_lines[i], "profile " + std::to_string(i + 1) + " is missing 'bounds'");
  }
  if (mc.gbar_mode == "proportional" && !(mc.gbar_param > 0.0))
    throw ConfigError("line 1: proportional factor must be positive");
  if (mc.gbar_mode == "flatten-rho" && (mc.gbar_index < 1 || mc.gbar_index > mc.dim))
    throw ConfigError("line 1: flatten-rho index out of range");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ScalarProfile make_profile(const ProfileConfig& pc) {
  ScalarProfile p;
  if (pc.kind == "sin")
    p = ScalarProfile::sine(pc.offset, pc.amplitude, pc.frequency);
  else if (pc.kind == "cos")
    p = ScalarProfile::cosine(pc.offset, pc.amplitude, pc.frequency);
  else if (pc.kind == "affine")
    p = ScalarProfile::affine(pc.offset, pc.slope, pc.bound_lo, pc.bound_hi);
  else if (pc.kind == "constant")
    p = ScalarProfile::constant_value(pc.value);
  else
    throw ConfigError("unknown profile kind: " + pc.kind);
  if (pc.has_range) {
    p.lo = pc.range_lo;
    p.hi = pc.range_hi;
  }
  return p;
}

ChartModel build_model(const ModelConfig& mc) {
  std::vector<ScalarProfile> profiles;
  std::vector<double> lo, hi;
  std::vector<bool> periodic;
  for (const auto& pc : mc.profiles) {
    profiles.push_back(make_profile(pc));
    lo.push_back(pc.bound_lo);
    hi.push_back(pc.bound_hi);
    periodic.push_back(pc.periodic);
  }
  ChartModel model = lc_generate(std::move(profiles), std::move(lo), std::move(hi),
                                 std::move(periodic));
  if (mc.gbar_mode == "proportional") return proportional_pair(model, mc.gbar_param);
  if (mc.gbar_mode == "flatten-rho") return break_rho(model, mc.gbar_index - 1);
  return model;
}

std::string render_config(const ModelConfig& mc) {
  std::ostringstream out;
  out << "dim = " << mc.dim << "\n";
  if (mc.gbar_mode == "proportional")
    out << "gbar = proportional " << fmt17(mc.gbar_param) << "\n";
  else if (mc.gbar_mode == "flatten-rho")
    out << "gbar = flatten-rho " << mc.gbar_index << "\n";

  for (int i = 0; i < mc.dim; ++i) {
    const ProfileConfig& pc = mc.profiles[i];
    const ScalarProfile p = make_profile(pc);
    out << "\n[profile " << i + 1 << "]\n";
    out << "kind = " << pc.kind << "\n";
    if (pc.kind == "sin" || pc.kind == "cos") {
      out << "offset = " << fmt17(pc.offset) << "\n";
      out << "amplitude = " << fmt17(pc.amplitude) << "\n";
      out << "frequency = " << fmt17(pc.frequency) << "\n";
    } else if (pc.kind == "affine") {
      out << "offset = " << fmt17(pc.offset) << "\n";
      out << "slope = " << fmt17(pc.slope) << "\n";
    } else {
      out << "value = " << fmt17(pc.value) << "\n";
    }
    out << "bounds = " << fmt17(pc.bound_lo) << " " << fmt17(pc.bound_hi) << "\n";
    out << "periodic = " << (pc.periodic ? "true" : "false") << "\n";
    out << "range = " << fmt17(p.lo) << " " << fmt17(p.hi) << "\n";
  }
  return out.str();
}

}  // namespace geq
