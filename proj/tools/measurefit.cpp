#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "measurefit/runner.hpp"

namespace {

int resolve_jobs(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MEASUREFIT_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measurefit: density-based parameter estimation for scalar "
               "SDEs (stationary and time-dependent Fokker-Planck fits)"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 0;

  struct Sub {
    measurefit::Command cmd;
    CLI::App* app;
  };
  std::vector<Sub> subs;
  auto add = [&](const char* name, const char* desc, measurefit::Command cmd) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("-c,--config", config_path, "config file")->required();
    s->add_option("-j,--jobs", jobs,
                  "parallel scan workers (default: MEASUREFIT_JOBS or cores)");
    subs.push_back({cmd, s});
  };
  add("stationary", "emit the stationary density of the model",
      measurefit::Command::Stationary);
  add("evolve", "solve the Fokker-Planck equation and emit the time series",
      measurefit::Command::Evolve);
  add("fit-stationary", "fit the family parameter to a stationary observation",
      measurefit::Command::FitStationary);
  add("fit-time", "fit the family parameter to a density time series",
      measurefit::Command::FitTime);
  add("drift-recover", "recover the drift function from a stationary observation",
      measurefit::Command::DriftRecover);

  CLI::App* hell = app.add_subcommand(
      "hellinger", "print the Hellinger distance between two density CSVs");
  std::string csv_a, csv_b;
  hell->add_option("first", csv_a, "first density CSV")->required();
  hell->add_option("second", csv_b, "second density CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (hell->parsed()) {
      measurefit::run_hellinger(csv_a, csv_b, std::cout);
      return 0;
    }
    for (const auto& s : subs) {
      if (s.app->parsed()) {
        const measurefit::RunConfig cfg = measurefit::parse_config(config_path);
        const int j = resolve_jobs(jobs);
        omp_set_num_threads(j);
        measurefit::run(s.cmd, cfg, j);
        return 0;
      }
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const measurefit::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const measurefit::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
