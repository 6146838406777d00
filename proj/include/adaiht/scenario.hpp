#pragma once

#include "adaiht/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adaiht {

/// One Monte Carlo scenario. Every replication draws a fresh design (unless
/// `fixed_design`), a signal on a uniform support and a noise vector, then
/// sweeps `a_over_astar` with the same random draws.
struct ScenarioConfig {
  std::string id = "scenario";
  long n = 200;
  long p = 400;
  long s = 5;
  double sigma = 1.0;
  std::vector<double> a_over_astar{2.0};
  double kappa = 0.5;
  double epsilon = 0.25;
  DesignKind design_kind = DesignKind::gaussian;
  bool normalize = true;
  double design_perturbation = 0.0;
  std::string design_path;
  bool fixed_design = false;
  NoiseKind noise_kind = NoiseKind::gaussian;
  MagnitudeKind magnitude_kind = MagnitudeKind::flat_a;
  long replications = 20;
  std::uint64_t master_seed = 1;
  std::vector<std::string> estimators{"iteration_selection", "sharp_estimation"};
  double penalty_const = 10.0;
  bool sharp_adaptive_sigma = false;
  long sharp_steps = 0;  ///< <= 0: mode default
  long max_iter = 10'000;
  long iht_iters = 100;
  long ista_iters = 5'000;
  double ista_tol = 1e-9;
  double lasso_lambda = -1.0;  ///< < 0: 2 sigma sqrt(2 n log p)
  bool record_timing = false;

  /// Throws ParseError on any violated constraint.
  void validate() const;
};

inline const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names{"nonadaptive",      "early_stopping", "iteration_selection",
                                              "sharp_estimation", "sharp_recovery", "iht_top_s",
                                              "ista_lasso",       "oracle_ls"};
  return names;
}

/// Assigns `key = value` (value in scenario-file syntax). Unknown keys throw.
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` file, TOML subset: '#' comments, quoted or bare strings,
/// numbers, true/false, and [a, b] arrays. Keys before the first `[section]`
/// are defaults; each section is one scenario whose id is the section name.
/// A file without sections yields a single scenario.
std::vector<ScenarioConfig> parse_scenarios(std::istream& in);
std::vector<ScenarioConfig> load_scenarios(const std::string& path);

/// Writes the config back in the same syntax (one section).
void write_scenario(std::ostream& out, const ScenarioConfig& config);

/// Splits "key=value"; throws ParseError without '='.
std::pair<std::string, std::string> split_override(const std::string& text);

}  // namespace adaiht
