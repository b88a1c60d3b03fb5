#include "measurefit/runner.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "measurefit/csv.hpp"
#include "measurefit/estimator.hpp"
#include "measurefit/stationary.hpp"

namespace measurefit {

namespace {

ScalarFunctionSpec build_function(const std::string& src,
                                  const expr::Bindings& constants,
                                  const std::optional<std::string>& family_param,
                                  const char* which) {
  expr::Expr e = [&] {
    try {
      return expr::Expr::parse(src);
    } catch (const expr::ParseError& err) {
      throw ConfigError(std::string(which) + " expression: " + err.what());
    }
  }();
  ScalarFunctionSpec spec(std::move(e), constants);
  for (const auto& p : spec.unbound_params())
    if (!family_param || p != *family_param)
      throw ConfigError(std::string(which) + " expression references '" + p +
                        "', which is neither the family parameter nor a "
                        "declared constant");
  return spec;
}

SdeModel build_model(const RunConfig& cfg) {
  if (!cfg.drift_src) throw ConfigError("[model] is missing 'drift'");
  if (!cfg.diffusion_src) throw ConfigError("[model] is missing 'diffusion'");
  SdeModel model{
      build_function(*cfg.drift_src, cfg.constants, cfg.parameter, "drift"),
      build_function(*cfg.diffusion_src, cfg.constants, cfg.parameter,
                     "diffusion")};
  return model;
}

SdeFamily build_family(const RunConfig& cfg) {
  if (!cfg.parameter)
    throw ConfigError("[model] must declare 'parameter' for a fit workflow");
  return SdeFamily(build_model(cfg), *cfg.parameter, *cfg.range_lo,
                   *cfg.range_hi);
}

/// Fixed model for the render workflows: either parameter-free, or the
/// family instantiated at [model] theta.
SdeModel build_fixed_model(const RunConfig& cfg) {
  if (cfg.parameter) {
    if (!cfg.theta)
      throw ConfigError(
          "[model] declares a parameter; set 'theta' to render a fixed model "
          "(or use a fit workflow)");
    return instantiate(build_family(cfg), *cfg.theta, cfg.grid);
  }
  SdeModel model = build_model(cfg);
  model.validate_on(cfg.grid);
  return model;
}

GridDensity sample_expression_density(const std::string& src,
                                      const expr::Bindings& bindings,
                                      const Grid1D& grid) {
  ScalarFunctionSpec f =
      build_function(src, bindings, std::nullopt, "observation");
  std::vector<double> v = f.tabulate(grid);
  for (double& y : v)
    if (y < 0.0)
      throw NumericError("observation expression takes negative values");
  return normalize(grid, std::move(v));
}

/// Align a CSV density with the model grid: exact match passes through,
/// otherwise the observation is resampled onto the model grid (which must
/// lie inside the observation's range).
GridDensity align_to_grid(const GridDensity& d, const Grid1D& grid) {
  if (d.grid() == grid) return normalize(d);
  if (grid.lo < d.grid().lo || grid.hi > d.grid().hi)
    throw ConfigError(
        "observation CSV does not cover the model grid; shrink [grid] to its "
        "range");
  return resample(d, grid);
}

Observation build_stationary_observation(const RunConfig& cfg) {
  if (cfg.obs_kind != RunConfig::ObsKind::Stationary)
    throw ConfigError("[observation] kind must be 'stationary' here");
  if (cfg.obs_expression)
    return Observation::stationary(
        sample_expression_density(*cfg.obs_expression, cfg.constants, cfg.grid),
        *cfg.obs_expression);
  if (cfg.obs_csv)
    return Observation::stationary(
        align_to_grid(csv::read_density_file(*cfg.obs_csv), cfg.grid),
        *cfg.obs_csv);
  throw ConfigError("[observation] needs 'expression' or 'csv'");
}

Observation build_time_observation(const RunConfig& cfg) {
  if (cfg.obs_kind != RunConfig::ObsKind::TimeDependent)
    throw ConfigError("[observation] kind must be 'time_dependent' here");
  if (cfg.obs_expression) {
    if (cfg.obs_times.empty())
      throw ConfigError("[observation] needs 'times' with an expression");
    // The expression may use t as a parameter; bind it per observation time.
    std::vector<GridDensity> qs;
    for (double t : cfg.obs_times) {
      expr::Bindings b = cfg.constants;
      b["t"] = t;
      qs.push_back(sample_expression_density(*cfg.obs_expression, b, cfg.grid));
    }
    return Observation::time_series(cfg.obs_times, std::move(qs),
                                    *cfg.obs_expression);
  }
  if (cfg.obs_csv) {
    if (!cfg.obs_times.empty())
      throw ConfigError(
          "[observation] 'times' conflicts with 'csv' (times come from the "
          "file)");
    csv::TimeSeries ts = csv::read_time_series_file(*cfg.obs_csv);
    std::vector<GridDensity> qs;
    for (auto& v : ts.values)
      qs.push_back(
          align_to_grid(GridDensity(ts.grid, std::move(v)), cfg.grid));
    return Observation::time_series(ts.times, std::move(qs), *cfg.obs_csv);
  }
  throw ConfigError("[observation] needs 'expression' or 'csv'");
}

FpProblem fp_template(const RunConfig& cfg, SdeModel model) {
  return FpProblem{.model = std::move(model),
                   .grid = cfg.grid,
                   .x0 = cfg.x0,
                   .output_times = {},
                   .dt = cfg.dt,
                   .dt_late = cfg.dt_late,
                   .t_switch = cfg.t_switch,
                   .initial = std::nullopt};
}

std::filesystem::path prepare_output_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + cfg.output_dir +
                      "'");
  return dir;
}

void write_report(const std::filesystem::path& dir, const FitResult& fit,
                  bool emit_plots) {
  std::ofstream out(dir / "report.txt", std::ios::binary);
  if (!out) throw ConfigError("cannot write report.txt");
  out << "theta_hat = " << csv::format_double(fit.theta_hat) << '\n'
      << "objective = " << csv::format_double(fit.objective_value) << '\n'
      << "iterations = " << fit.refinement_iterations << '\n'
      << "boundary_flag = " << (fit.boundary_minimum ? "true" : "false")
      << '\n';
  if (emit_plots)
    csv::write_scan_trace_file((dir / "scan_trace.csv").string(),
                               fit.scan_trace);
}

void check_mode(const RunConfig& cfg, const char* expected) {
  if (cfg.fit_mode && *cfg.fit_mode != expected)
    throw ConfigError(std::string("[fit] mode '") + *cfg.fit_mode +
                      "' does not match the requested workflow '" + expected +
                      "'");
}

}  // namespace

void run(Command cmd, const RunConfig& cfg, int jobs) {
  FitOptions opts;
  opts.scan_step = cfg.scan_step;
  opts.jobs = jobs;

  switch (cmd) {
    case Command::Stationary: {
      const SdeModel model = build_fixed_model(cfg);
      const GridDensity p = stationary_density(StationarySpec(model, cfg.grid));
      const auto dir = prepare_output_dir(cfg);
      csv::write_density_file((dir / "stationary.csv").string(), cfg.grid,
                              p.values());
      return;
    }
    case Command::Evolve: {
      const SdeModel model = build_fixed_model(cfg);
      if (cfg.fp_times.empty())
        throw ConfigError("[fp] needs 'times' for the evolve workflow");
      FpProblem prob = fp_template(cfg, model);
      prob.output_times = cfg.fp_times;
      const FpSolution sol = solve(prob);
      const auto dir = prepare_output_dir(cfg);
      csv::write_time_series_file((dir / "evolution.csv").string(), sol);
      return;
    }
    case Command::FitStationary: {
      check_mode(cfg, "stationary");
      const SdeFamily family = build_family(cfg);
      const Observation obs = build_stationary_observation(cfg);
      const FitResult fit = fit_stationary(family, obs, cfg.grid, opts);
      write_report(prepare_output_dir(cfg), fit, cfg.emit_plots);
      return;
    }
    case Command::FitTime: {
      check_mode(cfg, "time");
      const SdeFamily family = build_family(cfg);
      const Observation obs = build_time_observation(cfg);
      const FpProblem prob = fp_template(cfg, family.prototype);
      const FitResult fit = fit_time(family, obs, prob, opts);
      write_report(prepare_output_dir(cfg), fit, cfg.emit_plots);
      return;
    }
    case Command::DriftRecover: {
      if (!cfg.diffusion_src) throw ConfigError("[model] is missing 'diffusion'");
      const ScalarFunctionSpec sigma = build_function(
          *cfg.diffusion_src, cfg.constants, std::nullopt, "diffusion");
      const Observation obs = build_stationary_observation(cfg);
      const std::vector<double> b = recover_drift(obs, sigma, cfg.grid);
      const auto dir = prepare_output_dir(cfg);
      std::ofstream out(dir / "drift.csv", std::ios::binary);
      if (!out) throw ConfigError("cannot write drift.csv");
      out << "x,value\n";
      for (std::size_t i = 0; i < cfg.grid.n; ++i)
        out << csv::format_double(cfg.grid.node(i)) << ','
            << csv::format_double(b[i]) << '\n';
      return;
    }
  }
  throw ConfigError("unknown command");
}

void run_hellinger(const std::string& csv_a, const std::string& csv_b,
                   std::ostream& out) {
  const GridDensity a = normalize(csv::read_density_file(csv_a));
  GridDensity b = normalize(csv::read_density_file(csv_b));
  if (!(a.grid() == b.grid())) {
    if (a.grid().lo < b.grid().lo || a.grid().hi > b.grid().hi)
      throw ConfigError(
          "grids differ and the second file does not cover the first");
    b = resample(b, a.grid());
  }
  warn_if_heavy_tail(a, csv_a);
  warn_if_heavy_tail(b, csv_b);
  out << csv::format_double(hellinger(a, b)) << '\n';
}

}  // namespace measurefit
