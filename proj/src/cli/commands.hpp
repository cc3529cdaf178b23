#pragma once

#include "run_config.hpp"

#include "kot/datagen.hpp"
#include "kot/problem.hpp"
#include "kot/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace kot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct Instance {
  SampleSet mu;
  SampleSet nu;
  FillingPoints filling;
};

// Independent stream seeds derived from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Instance generate_instance(const RunConfig& cfg);
ProblemData assemble_instance(const RunConfig& cfg, const Instance& inst);

// samples_mu.csv, samples_nu.csv, filling.csv and manifest.json.
void write_instance(const std::filesystem::path& dir, const Instance& inst,
                    const RunConfig& cfg);
// Verifies the manifest checksums before parsing.
Instance load_instance(const std::filesystem::path& dir);

nlohmann::json report_to_json(const SolverReport& report);
std::string trace_to_csv(const SolverReport& report);

void cmd_gen(const RunConfig& cfg);
// Returns the report it wrote to report.json / trace.csv.
SolverReport cmd_solve(const RunConfig& cfg, const std::filesystem::path& instance_dir);
void cmd_benchmark(const RunConfig& cfg);
// One output row (x..., u, T...) per query row.
void cmd_map(const RunConfig& cfg, const std::filesystem::path& instance_dir,
             const std::filesystem::path& report_path,
             const std::filesystem::path& queries_path,
             const std::filesystem::path& output_path);

}  // namespace kot::cli
