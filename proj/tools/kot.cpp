#include "cli/commands.hpp"

#include "kot/error.hpp"
#include "kot/log.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace kot;
using namespace kot::cli;

namespace {

void add_common(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--n", o.n, "Number of filling points");
  cmd->add_option("--d", o.d, "Sample dimension");
  cmd->add_option("--n-sample", o.n_sample, "Samples per marginal");
  cmd->add_option("--tol", o.tol, "Residual tolerance");
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--method", o.method, "Solver: ssn or eg");
  cmd->add_option("--jobs", o.jobs, "Worker threads for benchmark sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  log::init_from_env();

  CLI::App app{"Kernel optimal transport solver"};
  app.require_subcommand(1);

  CliOverrides o;
  std::string instance_dir;
  std::string report_path;
  std::string queries_path;
  std::string output_path;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  add_common(gen, o);

  auto* solve = app.add_subcommand("solve", "Solve an instance");
  add_common(solve, o);
  solve->add_option("--instance", instance_dir, "Instance directory")->required();

  auto* bench = app.add_subcommand("benchmark", "Compare SSN and EG over a size sweep");
  add_common(bench, o);
  bench->add_option("--sweep", o.sweep, "Filling point counts")->delimiter(',');
  bench->add_option("--repeats", o.repeats, "Repeats per size");
  bench->add_option("--eg-max-iter", o.eg_max_iter, "Iteration cap for EG runs");

  auto* map = app.add_subcommand("map", "Evaluate the potential and transport map");
  add_common(map, o);
  map->add_option("--instance", instance_dir, "Instance directory")->required();
  map->add_option("--report", report_path, "Solver report JSON")->required();
  map->add_option("--queries", queries_path, "CSV of query points")->required();
  map->add_option("--output", output_path, "Output CSV (default <out>/map.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = resolve_config(o);
    if (*gen) {
      cmd_gen(cfg);
    } else if (*solve) {
      const SolverReport r = cmd_solve(cfg, instance_dir);
      std::cout << to_string(r.termination) << " iterations=" << r.iterations
                << " residual=" << r.final_residual << " ot=" << r.ot_estimate << '\n';
    } else if (*bench) {
      cmd_benchmark(cfg);
    } else if (*map) {
      cmd_map(cfg, instance_dir, report_path, queries_path,
              output_path.empty() ? cfg.out / "map.csv" : std::filesystem::path(output_path));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    // I/O failures such as an unwritable output directory.
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
