#pragma once

// Run configuration: flat `key = value` lines under [section] headers, '#'
// comments, lists as comma-separated values, matrix rows separated by ';'.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "postsel/distribution.hpp"
#include "postsel/two_regressor.hpp"

namespace postsel::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { two_regressor, general_design };

struct RunConfig {
  Scenario scenario = Scenario::two_regressor;

  // two_regressor
  int n = 7;
  double rho = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double theta1 = 0.0;
  double c2 = 2.015;
  std::vector<double> theta2;

  // general_design
  std::string design_path;
  Matrix gram;
  Vector theta;
  double sigma = 1.0;
  int min_order = 0;
  std::vector<double> criticals;
  Matrix target;

  // [grid]
  double grid_lo = -5.0;
  double grid_hi = 5.0;
  int grid_points = 101;

  // [run]
  int replications = 100000;
  std::uint64_t seed = 1;
  Variance variant = Variance::unknown;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  bool mc = false;

  // [convergence]
  std::vector<int> n_list;
  bool rescale = true;

  /// FNV-1a over the file text and any command-line overrides.
  std::uint64_t hash = 0;
  std::string source;
};

/// Parses and validates; every error message names the file, the line (when
/// one applies) and the offending field.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source,
                       const std::string& base_dir = ".");

/// Applies `--grid LO:HI:COUNT`.
void apply_grid_override(RunConfig& config, const std::string& spec);
Variance parse_variant(const std::string& text);

std::uint64_t fnv1a(const std::string& text, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// A model instance for one panel (two_regressor: one theta2 value).
struct PanelModel {
  RegressionDesign design;
  SelectionFamily family;
  TargetFunctional target;
  ParameterPoint params;
  std::optional<TwoRegressorSetting> setting;
};

int panel_count(const RunConfig& config);
/// Panel `index`, realized at sample size n (0 keeps the configured size).
/// With `rescaled`, the parameter becomes theta sqrt(n_config / n) on the tested coordinates.
PanelModel build_panel(const RunConfig& config, int index, int n = 0, bool rescaled = false);

IntegrationSpec integration_spec(const RunConfig& config);

}  // namespace postsel::cli
