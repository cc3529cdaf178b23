#include "commands.hpp"

#include "kot/error.hpp"
#include "kot/io.hpp"
#include "kot/log.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace kot::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kMuFile = "samples_mu.csv";
constexpr const char* kNuFile = "samples_nu.csv";
constexpr const char* kFillingFile = "filling.csv";
constexpr const char* kManifestFile = "manifest.json";

std::vector<std::string> coord_header(const char* prefix, Index d) {
  std::vector<std::string> h;
  for (Index j = 0; j < d; ++j) h.push_back(prefix + std::to_string(j));
  return h;
}

json num(double v) {
  // JSON has no NaN/Inf.
  return std::isfinite(v) ? json(v) : json(nullptr);
}

MixtureSpec mixture_for(const RunConfig& cfg, bool target) {
  const auto& explicit_spec = target ? cfg.nu_mixture : cfg.mu_mixture;
  if (explicit_spec) return *explicit_spec;
  const std::uint64_t base = target ? 3 : 1;
  MixtureSpec spec = default_mixture(cfg.d, target ? cfg.nu_components : cfg.mu_components,
                                     derive_seed(cfg.seed, base));
  spec.seed = derive_seed(cfg.seed, base + 1);
  return spec;
}

struct BenchRow {
  Method method = Method::Ssn;
  Index n = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double time_ms = 0.0;
  int iterations = 0;
  double final_residual = 0.0;
  Termination termination = Termination::MaxIter;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Instance generate_instance(const RunConfig& cfg) {
  Instance inst;
  inst.mu = sample_mixture(mixture_for(cfg, false), cfg.n_sample, SampleRole::SourceMu);
  inst.nu = sample_mixture(mixture_for(cfg, true), cfg.n_sample, SampleRole::TargetNu);
  if (cfg.filling_box == FillingBox::Data) {
    inst.filling = sobol_points(cfg.d, cfg.n, Box::bounding(inst.mu.points, 0.05),
                                Box::bounding(inst.nu.points, 0.05));
  } else {
    inst.filling = sobol_points(cfg.d, cfg.n, Box::unit(cfg.d), Box::unit(cfg.d));
  }
  return inst;
}

ProblemData assemble_instance(const RunConfig& cfg, const Instance& inst) {
  const Index d = inst.filling.dim();
  if (inst.mu.dim() != d || inst.nu.dim() != d) {
    throw DimensionError("instance: sample and filling dimensions differ");
  }
  RunConfig sized = cfg;
  sized.n_sample = inst.mu.size();
  return assemble(inst.mu, inst.nu, inst.filling, cfg.l1(inst.filling.size()), sized.l2(),
                  ProblemSpecs::gaussian(d, cfg.bandwidth_sq));
}

void write_instance(const fs::path& dir, const Instance& inst, const RunConfig& cfg) {
  const Index d = inst.filling.dim();
  Matrix filling(inst.filling.size(), 2 * d);
  filling << inst.filling.x_tilde, inst.filling.y_tilde;

  std::vector<std::string> fh = coord_header("x", d);
  for (auto& h : coord_header("y", d)) fh.push_back(h);

  const std::vector<std::pair<const char*, std::string>> files = {
      {kMuFile, io::to_csv(inst.mu.points, coord_header("x", d))},
      {kNuFile, io::to_csv(inst.nu.points, coord_header("y", d))},
      {kFillingFile, io::to_csv(filling, fh)},
  };
  json jfiles = json::object();
  for (const auto& [name, text] : files) {
    io::write_file(dir / name, text);
    jfiles[name] = {{"sha256", io::sha256_hex(text)}};
  }
  jfiles[kMuFile]["rows"] = inst.mu.size();
  jfiles[kNuFile]["rows"] = inst.nu.size();
  jfiles[kFillingFile]["rows"] = inst.filling.size();

  json manifest = {{"schema", 1},
                   {"seed", cfg.seed},
                   {"d", d},
                   {"n", inst.filling.size()},
                   {"n_sample", inst.mu.size()},
                   {"config", to_json(cfg)},
                   {"mixtures",
                    {{"mu", mixture_for(cfg, false).components.size()},
                     {"nu", mixture_for(cfg, true).components.size()}}},
                   {"files", jfiles}};
  io::write_file(dir / kManifestFile, manifest.dump(2) + "\n");
}

Instance load_instance(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(io::read_file(dir / kManifestFile));
  } catch (const json::parse_error& e) {
    throw ConfigError((dir / kManifestFile).string() + ": " + e.what());
  }
  if (manifest.value("schema", 0) != 1) {
    throw ConfigError("manifest: unsupported schema version");
  }
  std::map<std::string, Matrix> tables;
  for (const char* name : {kMuFile, kNuFile, kFillingFile}) {
    const std::string text = io::read_file(dir / name);
    const auto& entry = manifest["files"][name];
    if (!entry.is_object() || entry.value("sha256", "") != io::sha256_hex(text)) {
      throw ConfigError(std::string("checksum mismatch for ") + name);
    }
    tables[name] = io::parse_csv(text).values;
  }
  Instance inst;
  inst.mu = {tables[kMuFile], SampleRole::SourceMu};
  inst.nu = {tables[kNuFile], SampleRole::TargetNu};
  const Matrix& f = tables[kFillingFile];
  if (f.cols() % 2 != 0) throw DimensionError("filling.csv must have 2d columns");
  const Index d = f.cols() / 2;
  inst.filling.x_tilde = f.leftCols(d);
  inst.filling.y_tilde = f.rightCols(d);
  inst.filling.validate();
  if (inst.mu.dim() != d || inst.nu.dim() != d) {
    throw DimensionError("instance: sample and filling dimensions differ");
  }
  return inst;
}

json report_to_json(const SolverReport& r) {
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iter", t.iter},
                     {"residual", num(t.residual)},
                     {"residual_eg", num(t.residual_eg)},
                     {"residual_ssn", num(t.residual_ssn)},
                     {"accepted", std::string(to_string(t.accepted))},
                     {"theta", num(t.theta)},
                     {"mu", num(t.mu)},
                     {"cg_iters", t.cg_iters},
                     {"criterion_met", t.criterion_met},
                     {"system_residual", num(t.system_residual)},
                     {"criterion_bound", num(t.criterion_bound)},
                     {"dw_norm", num(t.dw_norm)},
                     {"wall_time_ms", t.wall_time_ms}});
  }
  return {{"schema", 1},
          {"method", std::string(to_string(r.method))},
          {"termination", std::string(to_string(r.termination))},
          {"iterations", r.iterations},
          {"initial_residual", num(r.initial_residual)},
          {"final_residual", num(r.final_residual)},
          {"ot_estimate", num(r.ot_estimate)},
          {"gamma_hat", std::vector<double>(r.gamma_hat.data(),
                                            r.gamma_hat.data() + r.gamma_hat.size())},
          {"total_ms", r.total_ms},
          {"trace", trace}};
}

std::string trace_to_csv(const SolverReport& r) {
  std::string out = "iter,residual,accepted,theta,cg_iters,ms\n";
  for (const auto& t : r.trace) {
    out += std::to_string(t.iter) + ',' + io::format_double(t.residual) + ',' +
           std::string(to_string(t.accepted)) + ',' + io::format_double(t.theta) + ',' +
           std::to_string(t.cg_iters) + ',' + io::format_double(t.wall_time_ms) + '\n';
  }
  return out;
}

void cmd_gen(const RunConfig& cfg) {
  const Instance inst = generate_instance(cfg);
  write_instance(cfg.out, inst, cfg);
  log::info("wrote instance d={} n={} n_sample={} to {}", cfg.d, cfg.n, cfg.n_sample,
            cfg.out.string());
}

SolverReport cmd_solve(const RunConfig& cfg, const fs::path& instance_dir) {
  const Instance inst = load_instance(instance_dir);
  const ProblemData pd = assemble_instance(cfg, inst);
  const SolverReport report = run_method(cfg.method, pd, cfg.solver);
  io::write_file(cfg.out / "report.json", report_to_json(report).dump(2) + "\n");
  io::write_file(cfg.out / "trace.csv", trace_to_csv(report));
  log::info("{}: {} after {} iterations, residual {}, ot {}", to_string(report.method),
            to_string(report.termination), report.iterations, report.final_residual,
            report.ot_estimate);
  return report;
}

void cmd_benchmark(const RunConfig& cfg) {
  std::vector<BenchRow> rows;
  for (Index n : cfg.sweep) {
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      for (Method m : {Method::Ssn, Method::Eg}) {
        BenchRow row;
        row.method = m;
        row.n = n;
        row.repeat = rep;
        row.seed = derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(rep));
        rows.push_back(row);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      BenchRow& row = rows[i];
      try {
        RunConfig c = cfg;
        c.n = row.n;
        c.seed = row.seed;
        const ProblemData pd = assemble_instance(c, generate_instance(c));
        SolverConfig sc = cfg.solver;
        if (row.method == Method::Eg && cfg.eg_max_iter) sc.max_iter = *cfg.eg_max_iter;
        const SolverReport rep = run_method(row.method, pd, sc);
        row.ok = true;
        row.time_ms = rep.total_ms;
        row.iterations = rep.iterations;
        row.final_residual = rep.final_residual;
        row.termination = rep.termination;
      } catch (const std::exception& e) {
        row.error = e.what();
        log::error("benchmark {} n={} repeat={}: {}", to_string(row.method), row.n,
                   row.repeat, e.what());
      }
    }
  };
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const std::size_t jobs =
      std::min<std::size_t>(cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : hw, rows.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string runs =
      "method,n,repeat,seed,status,time_ms,iterations,final_residual,termination\n";
  for (const auto& r : rows) {
    runs += std::string(to_string(r.method)) + ',' + std::to_string(r.n) + ',' +
            std::to_string(r.repeat) + ',' + std::to_string(r.seed) + ',' +
            (r.ok ? "ok" : "error") + ',' + io::format_double(r.time_ms) + ',' +
            std::to_string(r.iterations) + ',' + io::format_double(r.final_residual) + ',' +
            (r.ok ? std::string(to_string(r.termination)) : std::string()) + '\n';
  }
  io::write_file(cfg.out / "benchmark_runs.csv", runs);

  std::string summary = "method,n,runs,converged,mean_ms,std_ms,mean_iters,std_iters\n";
  for (Index n : cfg.sweep) {
    for (Method m : {Method::Ssn, Method::Eg}) {
      std::vector<double> ms, it;
      int converged = 0;
      for (const auto& r : rows) {
        if (r.n != n || r.method != m || !r.ok) continue;
        ms.push_back(r.time_ms);
        it.push_back(r.iterations);
        converged += r.termination == Termination::Converged;
      }
      auto stats = [](const std::vector<double>& v) {
        if (v.empty()) return std::pair{std::nan(""), std::nan("")};
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{mean, sd};
      };
      const auto [mms, sms] = stats(ms);
      const auto [mit, sit] = stats(it);
      summary += std::string(to_string(m)) + ',' + std::to_string(n) + ',' +
                 std::to_string(ms.size()) + ',' + std::to_string(converged) + ',' +
                 io::format_double(mms) + ',' + io::format_double(sms) + ',' +
                 io::format_double(mit) + ',' + io::format_double(sit) + '\n';
    }
  }
  io::write_file(cfg.out / "benchmark_summary.csv", summary);
}

void cmd_map(const RunConfig& cfg, const fs::path& instance_dir, const fs::path& report_path,
             const fs::path& queries_path, const fs::path& output_path) {
  const Instance inst = load_instance(instance_dir);
  json report;
  try {
    report = json::parse(io::read_file(report_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(report_path.string() + ": " + e.what());
  }
  if (!report.contains("gamma_hat")) throw ConfigError("report has no gamma_hat");
  std::vector<double> g;
  try {
    g = report["gamma_hat"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("gamma_hat: ") + e.what());
  }
  const Vector gamma = Eigen::Map<const Vector>(g.data(), static_cast<Index>(g.size()));
  if (gamma.size() != inst.filling.size()) {
    throw DimensionError("gamma_hat length does not match the instance");
  }
  const Matrix queries = io::read_csv(queries_path).values;
  const Index d = inst.filling.dim();
  if (queries.cols() != d) {
    throw DimensionError("queries have " + std::to_string(queries.cols()) +
                         " columns, instance dimension is " + std::to_string(d));
  }
  const ProblemData pd = assemble_instance(cfg, inst);

  Matrix out(queries.rows(), 2 * d + 1);
  for (Index i = 0; i < queries.rows(); ++i) {
    const Vector q = queries.row(i).transpose();
    const PotentialEval pe = potential_and_map(pd, inst.mu, gamma, {q.data(), static_cast<std::size_t>(d)});
    out.row(i).head(d) = q.transpose();
    out(i, d) = pe.u;
    out.row(i).tail(d) = pe.map.transpose();
  }
  std::vector<std::string> header = coord_header("x", d);
  header.push_back("u");
  for (auto& h : coord_header("T", d)) header.push_back(h);
  io::write_csv(output_path, out, header);
}

}  // namespace kot::cli
