// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include "cli/commands.hpp"
#include "kot/io.hpp"
#include "kot/log.hpp"
#include "kot/newton.hpp"
#include "kot/solver.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

using namespace kot;
using namespace kot::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every SSN trace produced here is re-checked by the safeguard criterion.
struct TracedRun {
  std::string label;
  std::vector<IterationRecord> trace;
};
std::vector<TracedRun> g_ssn_runs;

SolverReport traced_solve(const std::string& label, const ProblemData& pd,
                          const SolverConfig& cfg) {
  SolverReport r = solve(pd, cfg);
  g_ssn_runs.push_back({label, r.trace});
  return r;
}

cli::RunConfig synthetic_config(Index d, Index n, std::uint64_t seed) {
  cli::RunConfig cfg;
  cfg.d = d;
  cfg.n = n;
  cfg.n_sample = n;
  cfg.seed = seed;
  return cfg;
}

ProblemData synthetic(Index d, Index n, std::uint64_t seed) {
  const cli::RunConfig cfg = synthetic_config(d, n, seed);
  return cli::assemble_instance(cfg, cli::generate_instance(cfg));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double min_eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

Outcome newton_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 7;
    const ProblemData pd = random_problem(n, rng);
    const IteratePair w = random_iterate(n, rng);
    const ResidualEval re = residual_eval(pd, w);
    const NewtonContext ctx = make_newton_context(re.z_eig, re.norm, 0.05 + 0.1 * trial);
    const Matrix dense = probe_dense(n, [&](const IteratePair& dw) {
      return apply_jacobian(pd, ctx.omega(), ctx.mu(), dw);
    });
    const Vector expect = dense.partialPivLu().solve(-pack(re.r));
    NewtonConfig cfg;
    cfg.cg_tol = 1e-12;
    cfg.cg_max = static_cast<int>(n * n + n + 10);
    const NewtonStep step = newton_direction(pd, re.r, ctx, cfg);
    worst = std::max(worst, rel_err(pack(step.dw), expect));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 10.0,
          fmt::format("20 instances n=2..8, max rel err {:.2e} (<= 1e-8), {:.2f} s (< 10 s)",
                      worst, secs)};
}

Outcome inexact_criterion() {
  const ProblemData pd = synthetic(2, 100, 0);
  SolverConfig cfg;
  NewtonConfig nc;  // tau 0.5, kappa 0.1, cg cap 20
  int total = 0, met = 0, reverified = 0;
  double worst_excess = -1e300;
  cfg.newton_observer = [&](const NewtonProbe& p) {
    ++total;
    if (!p.step.criterion_met) return;
    ++met;
    // Recompute both sides from the full (n^2 + n) operator, not the
    // reduced CG system.
    const IteratePair lhs =
        apply_jacobian(pd, p.ctx.omega(), p.ctx.mu(), p.step.dw) + p.r;
    const double bound =
        nc.tau * std::min(1.0, nc.kappa * p.r.norm() * p.step.dw.norm());
    const double excess = lhs.norm() - bound;
    worst_excess = std::max(worst_excess, excess);
    if (excess <= 1e-12) ++reverified;
  };
  const SolverReport r = traced_solve("criterion 2", pd, cfg);
  const double frac = total == 0 ? 0.0 : static_cast<double>(met) / total;
  return {total > 0 && frac >= 0.95 && reverified == met,
          fmt::format("d=2 n=100: criterion met on {}/{} iterations ({:.1f}%, >= 95%), "
                      "{}/{} re-verified, worst lhs-bound {:.2e} (<= 1e-12), {}",
                      met, total, 100 * frac, reverified, met, worst_excess,
                      to_string(r.termination))};
}

Outcome kkt() {
  const ProblemData interior = ProblemData::from_matrices(
      Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 1.0), 0.0,
      Matrix::Constant(1, 1, 1.0), 1.0, 0.5);
  const ProblemData active = ProblemData::from_matrices(
      Matrix::Constant(1, 1, 2.0), Vector::Constant(1, -4.0), 0.0,
      Matrix::Constant(1, 1, 1.0), 1.0, 0.5);
  const double r_int =
      residual_eval(interior, {Vector::Constant(1, 0.5), Matrix::Zero(1, 1)}).norm;
  const double r_act =
      residual_eval(active, {Vector::Constant(1, -1.0), Matrix::Constant(1, 1, 2.0)}).norm;

  Rng rng(31);
  SolverConfig cfg;
  cfg.residual_tol = 1e-10;
  double worst_feas = 1e300, worst_x = 1e300, worst_gap = 0.0;
  int converged = 0, active_count = 0;
  for (int i = 0; i < 10; ++i) {
    const ProblemData pd = random_problem(5, rng);
    const SolverReport r = traced_solve(fmt::format("criterion 3 #{}", i), pd, cfg);
    converged += r.termination == Termination::Converged ? 1 : 0;
    const Matrix c = constraint_matrix(pd, r.gamma_hat);
    worst_feas = std::min(worst_feas, min_eig(c));
    worst_x = std::min(worst_x, min_eig(r.x_hat));
    worst_gap = std::max(worst_gap, std::abs(frobenius_inner(r.x_hat, c)));
    active_count += r.x_hat.norm() > 1e-6 ? 1 : 0;
  }
  const bool pass = r_int <= 1e-12 && r_act <= 1e-12 && converged == 10 &&
                    worst_feas >= -1e-8 && worst_x >= -1e-8 && worst_gap <= 1e-8;
  return {pass,
          fmt::format("fixtures |R| = {:.1e}, {:.1e} (<= 1e-12); random n=5: {}/10 converged "
                      "({} with active constraint), min eig(Phi*g + l1 I) {:.2e}, "
                      "min eig(X) {:.2e} (>= -1e-8), |<X, C>| {:.2e} (<= 1e-8)",
                      r_int, r_act, converged, active_count, worst_feas, worst_x,
                      worst_gap)};
}

Outcome projection_fd() {
  Rng rng(41);
  double worst_rel = 0.0, worst_spread = 0.0, min_gap = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 3 + trial % 6;
    const Index num_pos = 1 + trial % (n - 1);
    const Vector vals = spread_spectrum(n, num_pos, 0.2, rng);
    for (Index i = 0; i < n; ++i) {
      min_gap = std::min(min_gap, std::abs(vals(i)));
      for (Index j = i + 1; j < n; ++j) min_gap = std::min(min_gap, std::abs(vals(i) - vals(j)));
    }
    const Matrix z = with_spectrum(vals, rng);
    Matrix s = random_symmetric(n, rng);
    s /= s.norm();
    const OmegaStructure om = build_omega(sym_eig(z));
    const Matrix ds = apply_proj_jacobian(om, s);
    const Matrix pz = proj_psd(z);
    const auto fd = [&](double h) { return Matrix((proj_psd(Matrix(z + h * s)) - pz) / h); };
    worst_rel = std::max(worst_rel, rel_err(fd(1e-6), ds));
    std::vector<double> ratios;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const Matrix rem = proj_psd(Matrix(z + h * s)) - pz - h * ds;
      ratios.push_back(rem.norm() / (h * h));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    worst_spread = std::max(worst_spread, *hi / std::max(*lo, 1e-300));
  }
  return {min_gap >= 0.1 && worst_rel <= 1e-5 && worst_spread <= 10.0,
          fmt::format("10 matrices, eigen-gap {:.3f} (>= 0.1), max rel err at h=1e-6 {:.2e} "
                      "(<= 1e-5), remainder/h^2 max/min over h=1e-2..1e-4 {:.2f} (<= 10)",
                      min_gap, worst_rel, worst_spread)};
}

Outcome t_paths() {
  Rng rng(51);
  std::uniform_real_distribution<double> log_mu(-4.0, 1.0);
  double worst = 0.0;
  std::vector<int> seen_alpha_kind(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 8;
    Index num_pos = 0;
    switch (trial % 5) {
      case 0: num_pos = 0; break;
      case 1: num_pos = 1; break;
      case 2: num_pos = n - 1; break;
      case 3: num_pos = n; break;
      default: num_pos = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n)); break;
    }
    num_pos = std::min(num_pos, n);
    ++seen_alpha_kind[static_cast<std::size_t>(trial % 5)];
    const Matrix z = with_spectrum(spread_spectrum(n, num_pos, 0.3, rng), rng);
    const double mu = std::pow(10.0, log_mu(rng));
    const TOperator t = make_t_operator(build_omega(sym_eig(z)), mu);
    // Nonsymmetric arguments exercise the general form as well.
    const Matrix s = (trial % 2 == 0) ? random_symmetric(n, rng) : random_matrix(n, n, rng);
    const Matrix a = apply_t_operator(t, s, TPath::LowRankAlpha);
    const Matrix b = apply_t_operator(t, s, TPath::ComplementAlphaBar);
    const double scale = std::max(a.norm(), b.norm());
    worst = std::max(worst, scale == 0.0 ? 0.0 : (a - b).norm() / scale);
  }
  return {worst <= 1e-10,
          fmt::format("50 triples with |alpha| in {{0, 1, n-1, n, random}}, max rel diff "
                      "{:.2e} (<= 1e-10)",
                      worst)};
}

Outcome convergence_at_scale() {
  bool pass = true;
  std::string detail;
  for (Index d : {2, 5, 10}) {
    const auto t0 = Clock::now();
    const ProblemData pd = synthetic(d, 100, 0);
    const SolverReport r = traced_solve(fmt::format("criterion 6 d={}", d), pd, SolverConfig{});
    const double secs = seconds_since(t0);
    const bool ok = r.termination == Termination::Converged && r.final_residual <= 0.005 &&
                    r.iterations <= 500 && secs < 60.0;
    pass = pass && ok;
    detail += fmt::format("{}d={}: {} it, |R| {:.2e}, {:.2f} s", detail.empty() ? "" : "; ", d,
                          r.iterations, r.final_residual, secs);
  }
  return {pass, detail + " (Converged, <= 0.005, <= 500 it, < 60 s)"};
}

Outcome ssn_vs_eg() {
  // EG is stopped at kEgCap times the SSN iteration count. Its wall time to
  // reach the tolerance is at least its elapsed time at the cap, so a capped
  // EG run still bounds the comparison from the right side.
  constexpr int kEgCap = 10;
  bool pass = true;
  std::string detail;
  for (Index n : {100, 200, 500}) {
    const ProblemData pd = synthetic(10, n, 0);
    SolverConfig cfg;
    cfg.eg.stepsize = 0.01;
    std::vector<double> ssn_ms, eg_ms;
    int ssn_iters = 0;
    for (int rep = 0; rep < 3; ++rep) {
      const SolverReport r = traced_solve(fmt::format("criterion 7 n={} rep {}", n, rep), pd, cfg);
      ssn_ms.push_back(r.total_ms);
      ssn_iters = r.iterations;
      pass = pass && r.termination == Termination::Converged;
    }
    SolverConfig eg_cfg = cfg;
    eg_cfg.max_iter = kEgCap * ssn_iters;
    int eg_iters = 0;
    bool eg_converged = false;
    for (int rep = 0; rep < 3; ++rep) {
      const SolverReport r = solve_eg(pd, eg_cfg);
      eg_ms.push_back(r.total_ms);
      eg_iters = r.iterations;
      eg_converged = r.termination == Termination::Converged;
    }
    const double s = median(ssn_ms), e = median(eg_ms);
    pass = pass && s < e;
    if (n == 500) {
      // A censored EG run has not converged within kEgCap * ssn_iters >= 5x.
      pass = pass && eg_iters >= 5 * ssn_iters;
    }
    detail += fmt::format("{}n={}: SSN {:.0f} ms / {} it, EG {}{:.0f} ms / {}{} it",
                          detail.empty() ? "" : "; ", n, s, ssn_iters,
                          eg_converged ? "" : ">= ", e, eg_converged ? "" : ">= ", eg_iters);
  }
  return {pass, detail + fmt::format(" (median of 3; EG capped at {}x SSN iterations)", kEgCap)};
}

// Residuals of the trailing run of SSN-accepted iterations whose recorded
// residual ||R(w_{k+1})|| is at most 1e-2.
std::vector<double> local_tail(const SolverReport& r) {
  std::vector<double> tail;
  for (std::size_t k = r.trace.size(); k-- > 0;) {
    const IterationRecord& rec = r.trace[k];
    if (rec.accepted != StepSource::Ssn || rec.residual > 1e-2) break;
    tail.push_back(rec.residual);
  }
  std::reverse(tail.begin(), tail.end());
  return tail;
}

// Least-squares slope of log r_{k+1} against log r_k.
double order_fit(const std::vector<double>& r) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(r.size() - 1);
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double x = std::log(r[k]), y = std::log(r[k + 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Outcome global_rate() {
  std::vector<double> bounds, certificates;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const ProblemData pd = synthetic(10, 200, seed);
    SolverConfig cfg;
    cfg.residual_tol = 1e-300;  // run the full horizon
    cfg.max_iter = 1000;
    const SolverReport r = traced_solve(fmt::format("criterion 8a seed {}", seed), pd, cfg);
    double b = 0.0, c = 0.0;
    for (const IterationRecord& rec : r.trace) {
      const double k = rec.iter + 1;  // rec.residual is ||R(w_{iter+1})||
      if (k < 10 || k > 1000) continue;
      b = std::max(b, k * rec.residual * rec.residual);
      c = std::max(c, k * rec.residual_eg * rec.residual_eg);
    }
    bounds.push_back(b);
    certificates.push_back(c);
    detail += fmt::format("{}seed {}: sup k|R(w_k)|^2 = {:.2e} (safeguard sup k|R(v_k)|^2 = "
                          "{:.2e}, {} it)",
                          detail.empty() ? "" : "; ", seed, b, c, r.iterations);
  }
  const auto [lo, hi] = std::minmax_element(bounds.begin(), bounds.end());
  const double spread = *hi / std::max(*lo, 1e-300);
  return {spread <= 10.0,
          detail + fmt::format("; spread of sup k|R(w_k)|^2 across seeds {:.2e} (<= 10)", spread)};
}

Outcome local_rate() {
  const ProblemData pd = synthetic(10, 200, 0);
  SolverConfig cfg;
  cfg.residual_tol = 1e-9;
  const SolverReport r = traced_solve("criterion 8b", pd, cfg);
  const std::vector<double> tail = local_tail(r);
  const double p = tail.size() >= 3 ? order_fit(tail) : 0.0;
  std::string seq;
  for (double v : tail) seq += fmt::format("{}{:.1e}", seq.empty() ? "" : " -> ", v);
  return {r.termination == Termination::Converged && tail.size() >= 3 && p >= 1.5,
          fmt::format("d=10 n=200 tol 1e-9: last {} SSN iterations with |R| <= 1e-2 ({}), "
                      "fitted order {:.2f} (>= 1.5)",
                      tail.size(), seq, p)};
}

Outcome safeguard() {
  std::size_t checked = 0, violations = 0;
  std::string first;
  for (const TracedRun& run : g_ssn_runs) {
    for (const IterationRecord& rec : run.trace) {
      ++checked;
      if (!(rec.residual <= rec.residual_eg)) {
        if (violations++ == 0) first = fmt::format(" first: {} iter {}", run.label, rec.iter);
      }
    }
  }
  return {checked > 0 && violations == 0,
          fmt::format("|R(w_k)| <= |R(v_k)| on {} iterations of {} runs, {} violations{}",
                      checked, g_ssn_runs.size(), violations, first)};
}

// Report JSON with the wall-clock fields removed.
std::string untimed_report(const fs::path& path) {
  nlohmann::json j = nlohmann::json::parse(io::read_file(path));
  j.erase("total_ms");
  for (auto& rec : j.at("trace")) {
    rec.erase("wall_time_ms");
    rec.erase("phases");
  }
  return j.dump();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "kot_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> reports, gammas, instances;
  for (const char* tag : {"a", "b"}) {
    cli::RunConfig cfg = synthetic_config(2, 100, 7);
    cfg.out = root / tag / "instance";
    cli::cmd_gen(cfg);
    cfg.out = root / tag / "run";
    cli::cmd_solve(cfg, root / tag / "instance");
    reports.push_back(untimed_report(root / tag / "run" / "report.json"));
    gammas.push_back(
        nlohmann::json::parse(io::read_file(root / tag / "run" / "report.json"))
            .at("gamma_hat")
            .dump());
    std::string files;
    for (const char* f : {"samples_mu.csv", "samples_nu.csv", "filling.csv", "manifest.json"})
      files += io::read_file(root / tag / "instance" / f);
    instances.push_back(files);
  }
  fs::remove_all(root);
  const bool pass = reports[0] == reports[1] && gammas[0] == gammas[1] &&
                    instances[0] == instances[1];
  return {pass, fmt::format("gen -> solve twice with seed 7: instance files {}, gamma_hat {}, "
                            "report and trace without timing fields {}",
                            instances[0] == instances[1] ? "identical" : "differ",
                            gammas[0] == gammas[1] ? "identical" : "differ",
                            reports[0] == reports[1] ? "identical" : "differ")};
}

}  // namespace

int main() {
  log::init_from_env();
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  // The safeguard check runs last so it sees every traced solve.
  const std::vector<Criterion> criteria = {
      {"1 Newton-step oracle equivalence", newton_oracle},
      {"2 inexact Newton criterion", inexact_criterion},
      {"3 KKT characterization", kkt},
      {"4 projection Jacobian finite differences", projection_fd},
      {"5 T-operator path equivalence", t_paths},
      {"6 convergence at benchmark scale", convergence_at_scale},
      {"7 SSN faster than pure EG", ssn_vs_eg},
      {"8a global rate proxy", global_rate},
      {"8b local rate proxy", local_rate},
      {"10 determinism", determinism},
      {"9 safeguard inequality", safeguard},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
