#ifndef GEQLAB_CONFIG_HPP
#define GEQLAB_CONFIG_HPP

#include "geqlab/chart.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace geq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One [profile i] section of a model config.
struct ProfileConfig {
  std::string kind;  // sin | cos | affine | constant
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 1.0;
  double slope = 0.0;
  double value = 0.0;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  bool periodic = true;
  bool has_range = false;  // explicit range override (otherwise derived)
  double range_lo = 0.0;
  double range_hi = 0.0;
};

struct ModelConfig {
  int dim = 0;
  // gbar = lc (canonical), proportional <c>, or flatten-rho <i> (1-based)
  std::string gbar_mode = "lc";
  double gbar_param = 0.0;
  int gbar_index = 0;
  std::vector<ProfileConfig> profiles;
};

struct RunConfig {
  ModelConfig model;
};

// Parses the key = value / [profile i] format; errors cite line numbers.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

ScalarProfile make_profile(const ProfileConfig& pc);
ChartModel build_model(const ModelConfig& mc);

// Normalized, reparseable rendering (all keys explicit, ranges included).
std::string render_config(const ModelConfig& mc);

}  // namespace geq

#endif
