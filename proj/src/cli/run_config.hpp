#pragma once

#include "kot/datagen.hpp"
#include "kot/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kot::cli {

enum class FillingBox { Data, Unit };

struct RunConfig {
  Index d = 2;
  Index n = 100;
  Index n_sample = 100;
  std::uint64_t seed = 0;

  double bandwidth_sq = 0.005;
  std::optional<double> lambda1;  // default 1/n
  std::optional<double> lambda2;  // default 1/sqrt(n_sample)

  int mu_components = 3;
  int nu_components = 5;
  // Explicit mixtures replace the seeded defaults when present.
  std::optional<MixtureSpec> mu_mixture;
  std::optional<MixtureSpec> nu_mixture;
  FillingBox filling_box = FillingBox::Data;

  SolverConfig solver;
  Method method = Method::Ssn;

  int jobs = 0;  // 0: one per hardware thread
  std::vector<Index> sweep = {100, 200, 500};
  int repeats = 3;
  std::optional<int> eg_max_iter;

  std::filesystem::path out = ".";

  double l1(Index order) const;
  double l2() const;
  void validate() const;
};

// Flags given on the command line; each set field overrides the file.
struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<Index> n;
  std::optional<Index> d;
  std::optional<Index> n_sample;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<int> jobs;
  std::optional<std::vector<Index>> sweep;
  std::optional<int> repeats;
  std::optional<int> eg_max_iter;
};

// Keys not listed here are rejected so typos surface as config errors.
RunConfig apply_json(RunConfig base, const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// default < config file < flags.
RunConfig resolve_config(const CliOverrides& flags);

Method parse_method(const std::string& s);

}  // namespace kot::cli
