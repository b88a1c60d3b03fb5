#pragma once

#include <string>

#include "measurefit/config.hpp"

namespace measurefit {

enum class Command {
  Stationary,
  Evolve,
  FitStationary,
  FitTime,
  DriftRecover,
};

/// Execute a workflow, writing its artifacts into cfg.output_dir:
///   stationary    → stationary.csv
///   evolve        → evolution.csv
///   fit-*         → report.txt (+ scan_trace.csv when emit_plots)
///   drift-recover → drift.csv
/// Throws ConfigError for bad input, NumericError for numerical failures.
/// All outputs are deterministic for a fixed config.
void run(Command cmd, const RunConfig& cfg, int jobs);

/// Print the Hellinger distance between two density CSV files to `out`.
/// When the grids differ, the second density is resampled onto the first
/// grid (its range must cover it).
void run_hellinger(const std::string& csv_a, const std::string& csv_b,
                   std::ostream& out);

}  // namespace measurefit
