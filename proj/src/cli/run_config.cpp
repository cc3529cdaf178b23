#include "run_config.hpp"

#include "kot/error.hpp"
#include "kot/io.hpp"

#include <cmath>
#include <set>

namespace kot::cli {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  T v{};
  read(j, key, v);
  dst = v;
}

MixtureSpec mixture_from_json(const json& j, const std::string& where) {
  check_keys(j, {"components", "seed"}, where);
  MixtureSpec spec;
  read(j, "seed", spec.seed);
  if (!j.contains("components") || !j["components"].is_array()) {
    throw ConfigError(where + ": 'components' must be an array");
  }
  for (const auto& c : j["components"]) {
    check_keys(c, {"weight", "mean", "std"}, where + ".components[]");
    MixtureComponent comp;
    read(c, "weight", comp.weight);
    read(c, "std", comp.isotropic_std);
    std::vector<double> mean;
    read(c, "mean", mean);
    comp.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Index>(mean.size()));
    spec.components.push_back(std::move(comp));
  }
  spec.dim = spec.components.empty() ? 0 : spec.components.front().mean.size();
  return spec;
}

json mixture_to_json(const MixtureSpec& spec) {
  json comps = json::array();
  for (const auto& c : spec.components) {
    comps.push_back({{"weight", c.weight},
                     {"mean", std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size())},
                     {"std", c.isotropic_std}});
  }
  return {{"seed", spec.seed}, {"components", comps}};
}

}  // namespace

double RunConfig::l1(Index order) const {
  return lambda1 ? *lambda1 : 1.0 / static_cast<double>(order);
}

double RunConfig::l2() const {
  return lambda2 ? *lambda2 : 1.0 / std::sqrt(static_cast<double>(n_sample));
}

void RunConfig::validate() const {
  if (d < 1 || n < 1 || n_sample < 1) {
    throw ConfigError("d, n and n-sample must all be >= 1");
  }
  if (2 * d > SobolStream::kMaxDim) {
    throw ConfigError("d must be <= " + std::to_string(SobolStream::kMaxDim / 2));
  }
  if (!(bandwidth_sq > 0.0)) throw ConfigError("bandwidth_sq must be > 0");
  if (lambda1 && !(*lambda1 > 0.0)) throw ConfigError("lambda1 must be > 0");
  if (lambda2 && !(*lambda2 > 0.0)) throw ConfigError("lambda2 must be > 0");
  if (mu_components < 1 || nu_components < 1) {
    throw ConfigError("mixtures need at least one component");
  }
  for (const auto* m : {&mu_mixture, &nu_mixture}) {
    if (!*m) continue;
    if ((*m)->dim != d) throw ConfigError("mixture dimension does not match d");
    try {
      (*m)->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (sweep.empty()) throw ConfigError("sweep must be nonempty");
  for (Index s : sweep) {
    if (s < 1) throw ConfigError("sweep sizes must be >= 1");
  }
  if (eg_max_iter && *eg_max_iter < 1) throw ConfigError("eg_max_iter must be >= 1");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Method parse_method(const std::string& s) {
  if (s == "ssn") return Method::Ssn;
  if (s == "eg") return Method::Eg;
  throw ConfigError("unknown method '" + s + "' (expected ssn or eg)");
}

RunConfig apply_json(RunConfig cfg, const json& j) {
  check_keys(j, {"d", "n", "n_sample", "seed", "bandwidth_sq", "lambda1", "lambda2",
                 "mu_components", "nu_components", "mu_mixture", "nu_mixture",
                 "filling_box", "tol", "max_iter", "theta0", "method", "newton", "eg",
                 "jobs", "sweep", "repeats", "eg_max_iter", "out"},
             "config");
  read(j, "d", cfg.d);
  read(j, "n", cfg.n);
  read(j, "n_sample", cfg.n_sample);
  read(j, "seed", cfg.seed);
  read(j, "bandwidth_sq", cfg.bandwidth_sq);
  read(j, "lambda1", cfg.lambda1);
  read(j, "lambda2", cfg.lambda2);
  read(j, "mu_components", cfg.mu_components);
  read(j, "nu_components", cfg.nu_components);
  if (j.contains("mu_mixture")) cfg.mu_mixture = mixture_from_json(j["mu_mixture"], "mu_mixture");
  if (j.contains("nu_mixture")) cfg.nu_mixture = mixture_from_json(j["nu_mixture"], "nu_mixture");
  if (j.contains("filling_box")) {
    std::string box;
    read(j, "filling_box", box);
    if (box == "data") {
      cfg.filling_box = FillingBox::Data;
    } else if (box == "unit") {
      cfg.filling_box = FillingBox::Unit;
    } else {
      throw ConfigError("filling_box must be 'data' or 'unit'");
    }
  }
  read(j, "tol", cfg.solver.residual_tol);
  read(j, "max_iter", cfg.solver.max_iter);
  read(j, "theta0", cfg.solver.theta0);
  if (j.contains("method")) {
    std::string m;
    read(j, "method", m);
    cfg.method = parse_method(m);
  }
  if (j.contains("newton")) {
    const json& nj = j["newton"];
    check_keys(nj, {"tau", "kappa", "alpha1", "alpha2", "beta0", "beta1", "beta2",
                    "theta_min", "theta_max", "cg_max", "cg_restarts", "cg_tol"},
               "newton");
    auto& nc = cfg.solver.newton;
    read(nj, "tau", nc.tau);
    read(nj, "kappa", nc.kappa);
    read(nj, "alpha1", nc.alpha1);
    read(nj, "alpha2", nc.alpha2);
    read(nj, "beta0", nc.beta0);
    read(nj, "beta1", nc.beta1);
    read(nj, "beta2", nc.beta2);
    read(nj, "theta_min", nc.theta_min);
    read(nj, "theta_max", nc.theta_max);
    read(nj, "cg_max", nc.cg_max);
    read(nj, "cg_restarts", nc.cg_restarts);
    read(nj, "cg_tol", nc.cg_tol);
  }
  if (j.contains("eg")) {
    check_keys(j["eg"], {"stepsize"}, "eg");
    read(j["eg"], "stepsize", cfg.solver.eg.stepsize);
  }
  read(j, "jobs", cfg.jobs);
  read(j, "sweep", cfg.sweep);
  read(j, "repeats", cfg.repeats);
  read(j, "eg_max_iter", cfg.eg_max_iter);
  if (j.contains("out")) {
    std::string out;
    read(j, "out", out);
    cfg.out = out;
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const auto& nc = cfg.solver.newton;
  json newton = {{"tau", nc.tau},         {"kappa", nc.kappa},
                 {"alpha1", nc.alpha1},   {"alpha2", nc.alpha2},
                 {"beta0", nc.beta0},     {"beta1", nc.beta1},
                 {"beta2", nc.beta2},     {"theta_min", nc.theta_min},
                 {"theta_max", nc.theta_max}, {"cg_max", nc.cg_max},
                 {"cg_restarts", nc.cg_restarts}};
  if (nc.cg_tol) newton["cg_tol"] = *nc.cg_tol;
  json j = {{"d", cfg.d},
            {"n", cfg.n},
            {"n_sample", cfg.n_sample},
            {"seed", cfg.seed},
            {"bandwidth_sq", cfg.bandwidth_sq},
            {"mu_components", cfg.mu_components},
            {"nu_components", cfg.nu_components},
            {"filling_box", cfg.filling_box == FillingBox::Data ? "data" : "unit"},
            {"tol", cfg.solver.residual_tol},
            {"max_iter", cfg.solver.max_iter},
            {"theta0", cfg.solver.theta0},
            {"method", std::string(to_string(cfg.method))},
            {"newton", newton},
            {"eg", {{"stepsize", cfg.solver.eg.stepsize}}}};
  if (cfg.lambda1) j["lambda1"] = *cfg.lambda1;
  if (cfg.lambda2) j["lambda2"] = *cfg.lambda2;
  if (cfg.mu_mixture) j["mu_mixture"] = mixture_to_json(*cfg.mu_mixture);
  if (cfg.nu_mixture) j["nu_mixture"] = mixture_to_json(*cfg.nu_mixture);
  return j;
}

RunConfig resolve_config(const CliOverrides& f) {
  RunConfig cfg;
  if (f.config_path) {
    json j;
    try {
      j = json::parse(io::read_file(*f.config_path));
    } catch (const json::parse_error& e) {
      throw ConfigError(*f.config_path + ": " + e.what());
    }
    cfg = apply_json(cfg, j);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.n) cfg.n = *f.n;
  if (f.d) cfg.d = *f.d;
  if (f.n_sample) cfg.n_sample = *f.n_sample;
  if (f.tol) cfg.solver.residual_tol = *f.tol;
  if (f.max_iter) cfg.solver.max_iter = *f.max_iter;
  if (f.out) cfg.out = *f.out;
  if (f.method) cfg.method = parse_method(*f.method);
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.sweep) cfg.sweep = *f.sweep;
  if (f.repeats) cfg.repeats = *f.repeats;
  if (f.eg_max_iter) cfg.eg_max_iter = *f.eg_max_iter;
  cfg.validate();
  return cfg;
}

}  // namespace kot::cli
