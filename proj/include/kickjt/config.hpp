#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kickjt/model.hpp"

namespace kickjt {

/// Evaluates an arithmetic expression: numbers, pi, + - * / ^, parentheses,
/// and sqrt, sin, cos, tan, atan, acot, exp, log. Throws ConfigError.
double evaluate_expression(const std::string& text);

struct PortraitSettings {
  double extent = 4.0;
  int points_per_axis = 9;
  int iterations = 400;
  double p_slope = 0.0;
  double spin_theta = std::numbers::pi;  ///< pi is the s_z = -1/2 pole
  double spin_phi = 0.0;
};

struct TrackSettings {
  double initial_step = 0.01;
  double max_step = 0.02;
  double min_step = 1e-6;
};

struct HusimiSettings {
  double section_min = -6.0;
  double section_max = 6.0;
  int section_points = 161;
  double plane_lambda = 0.32;
  double plane_min = -4.0;
  double plane_max = 4.0;
  int plane_points = 81;
};

struct ScenarioConfig {
  ModelParams model;
  NumericsConfig numerics;
  std::vector<double> lambdas;  ///< strictly increasing, non-empty
  PortraitSettings portrait;
  TrackSettings tracking;
  HusimiSettings husimi;

  /// Config key -> 1-based line where it was set.
  std::map<std::string, int> key_lines;

  ValidatedConfig validated() const;
};

/// Parses the key = value format documented in the README. Every problem is
/// reported as ConfigError carrying the offending line.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace kickjt
