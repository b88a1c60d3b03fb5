#pragma once

#include <optional>
#include <string>
#include <vector>

#include "measurefit/density.hpp"
#include "measurefit/expr.hpp"

namespace measurefit {

/// Parsed run configuration. Parsing is strict (unknown sections or keys and
/// duplicate keys are errors); which keys are required depends on the
/// subcommand and is checked by the runner.
struct RunConfig {
  // [model]
  std::optional<std::string> drift_src;
  std::optional<std::string> diffusion_src;
  std::optional<std::string> parameter;
  std::optional<double> range_lo, range_hi;
  std::optional<double> theta;  ///< fixed value for stationary/evolve runs

  // [grid] — defaults applied (with a warning) when the section is missing
  Grid1D grid{-40.0, 40.0, 4001};
  bool grid_defaulted = true;

  // [constants]
  expr::Bindings constants;

  // [observation]
  enum class ObsKind { None, Stationary, TimeDependent };
  ObsKind obs_kind = ObsKind::None;
  std::optional<std::string> obs_expression;
  std::optional<std::string> obs_csv;
  std::vector<double> obs_times;

  // [fp]
  double x0 = 0.0;
  double dt = 1e-3;
  double dt_late = 1e-2;
  double t_switch = 1.0;
  std::vector<double> fp_times;  ///< output times for the evolve workflow

  // [fit]
  double scan_step = 0.1;
  std::optional<std::string> fit_mode;  ///< "stationary" or "time"

  // [output]
  std::string output_dir = "out";
  bool emit_plots = true;
};

/// Line-oriented config grammar: `[section]` headers, `key = value` entries,
/// `#` comments. Values are numbers, quoted strings, bare expression text,
/// or comma-separated time lists where an element may be a `start:step:end`
/// range. Throws ConfigError with the offending line number.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace measurefit
