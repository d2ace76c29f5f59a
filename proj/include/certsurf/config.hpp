#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "certsurf/interval.hpp"
#include "certsurf/system.hpp"

namespace certsurf {

enum class RunMode { surface, graph };

/// Malformed configuration or flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::vector<std::string> variables;  ///< empty: order of first appearance
  std::vector<std::string> equations;
  Eigen::VectorXd start;
  double r_initial = 0.1;
  double rho = 0.125;
  std::optional<IntervalBox> domain;
  std::optional<std::size_t> max_boxes;
  std::string out_json;
  std::string out_obj;
  RunMode mode = RunMode::surface;

  // graph mode
  std::optional<IntervalBox> base_box;  ///< U
  std::optional<IntervalBox> fiber_box;  ///< fiber search box over the center of U
  int sheets = 1;

  /// Parses and checks the equations; throws ParseError or ConfigError.
  AnalyticSystem build_system() const;
  /// Throws ConfigError on inconsistent fields.
  void validate() const;
};

/// Flat `key = value` text.  Keys: variables, equation (repeatable), start,
/// r, rho, domain, max_boxes, out_json, out_obj, mode, base, fiber, sheets.
/// Lines starting with '#' and blank lines are ignored.  Boxes are written
/// as `lo hi lo hi ...`.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Reads `1/8` or `0.125`; a rational is rounded toward the smaller value.
double parse_rho(const std::string& text);
/// Whitespace- or comma-separated reals.
std::vector<double> parse_reals(const std::string& text);
/// `lo hi lo hi ...` pairs.
IntervalBox parse_box(const std::string& text);

}  // namespace certsurf
