#include "kot/solver.hpp"

#include "kot/log.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kot {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
auto timed(double& acc_ms, F&& f) {
  const auto t0 = Clock::now();
  auto out = f();
  acc_ms += ms_since(t0);
  return out;
}

void finish(const ProblemData& pd, const IteratePair& w, double res,
            SolverReport& report, Clock::time_point start) {
  report.gamma_hat = w.gamma;
  report.x_hat = w.x;
  report.final_residual = res;
  report.ot_estimate = ot_estimate(pd, w.gamma);
  report.iterations = static_cast<int>(report.trace.size());
  report.total_ms = ms_since(start);
}

void check_finite(double res, const char* what, int iter,
                  const std::vector<IterationRecord>& trace) {
  if (!std::isfinite(res)) {
    throw SolverError(std::string("non-finite residual (") + what +
                          ") at iteration " + std::to_string(iter),
                      trace);
  }
}

}  // namespace

std::string_view to_string(Method m) {
  return m == Method::Ssn ? "ssn" : "eg";
}
std::string_view to_string(StepSource s) {
  return s == StepSource::Ssn ? "ssn" : "eg";
}
std::string_view to_string(Termination t) {
  return t == Termination::Converged ? "converged" : "max_iter";
}

void SolverConfig::validate() const {
  newton.validate();
  eg.validate();
  if (!(residual_tol > 0.0)) {
    throw std::invalid_argument("SolverConfig: residual_tol must be > 0");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  }
  if (!(theta0 >= newton.theta_min && theta0 <= newton.theta_max)) {
    throw std::invalid_argument("SolverConfig: theta0 outside [theta_min, theta_max]");
  }
}

IteratePair initial_point(const ProblemData& pd) {
  return IteratePair::zero(pd.order());
}

SolverReport solve(const ProblemData& pd, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  SolverReport report;
  report.method = Method::Ssn;

  IteratePair w = initial_point(pd);
  IteratePair v = w;
  ResidualEval rw = residual_eval(pd, w);
  ResidualEval rv = rw;
  report.initial_residual = rw.norm;
  check_finite(rw.norm, "initial point", 0, report.trace);
  double theta = cfg.theta0;

  for (int k = 0; k < cfg.max_iter; ++k) {
    if (rw.norm <= cfg.residual_tol) {
      report.termination = Termination::Converged;
      break;
    }
    IterationRecord rec;
    rec.iter = k;
    rec.theta = theta;

    try {
      v = timed(rec.phases.eg_ms, [&] { return eg_step(pd, v, cfg.eg); });
      rv = timed(rec.phases.residual_ms, [&] { return residual_eval(pd, v); });

      const NewtonContext ctx = make_newton_context(rw.z_eig, rw.norm, theta);
      rec.mu = ctx.mu();
      const NewtonStep step = timed(rec.phases.direction_ms, [&] {
        return newton_direction(pd, rw.r, ctx, cfg.newton);
      });
      rec.cg_iters = step.cg_iters;
      rec.criterion_met = step.criterion_met;
      rec.system_residual = step.system_residual;
      rec.criterion_bound = step.criterion_bound;
      rec.dw_norm = step.dw.norm();
      if (cfg.newton_observer) cfg.newton_observer(NewtonProbe{k, rw.r, ctx, step});

      IteratePair trial = w + step.dw;
      ResidualEval rt =
          timed(rec.phases.residual_ms, [&] { return residual_eval(pd, trial); });
      rec.residual_ssn = rt.norm;
      rec.residual_eg = rv.norm;

      const double rho = -inner(rt.r, step.dw);
      theta = theta_update(theta, rho, inner(step.dw, step.dw), cfg.newton);

      if (rt.norm <= rv.norm) {
        w = std::move(trial);
        rw = std::move(rt);
        rec.accepted = StepSource::Ssn;
      } else {
        w = v;
        rw = rv;
        rec.accepted = StepSource::Eg;
      }
    } catch (const SolverError&) {
      throw;
    } catch (const NumericError& e) {
      throw SolverError(std::string(e.what()) + " at iteration " +
                            std::to_string(k),
                        report.trace);
    }

    rec.residual = rw.norm;
    rec.wall_time_ms = ms_since(start);
    report.trace.push_back(rec);
    check_finite(rw.norm, "accepted iterate", k, report.trace);
    log::debug("ssn iter {} res {:.3e} (ssn {:.3e}, eg {:.3e}) {} theta {:.3g} "
               "mu {:.3g} cg {} crit {}",
               k, rec.residual, rec.residual_ssn, rec.residual_eg,
               to_string(rec.accepted), rec.theta, rec.mu, rec.cg_iters,
               rec.criterion_met);
  }
  if (rw.norm <= cfg.residual_tol) report.termination = Termination::Converged;

  finish(pd, w, rw.norm, report, start);
  log::info("ssn: {} after {} iterations, residual {:.3e}, {:.1f} ms",
            to_string(report.termination), report.iterations,
            report.final_residual, report.total_ms);
  return report;
}

SolverReport solve_eg(const ProblemData& pd, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  SolverReport report;
  report.method = Method::Eg;

  IteratePair v = initial_point(pd);
  double res = residual_eval(pd, v).norm;
  report.initial_residual = res;
  check_finite(res, "initial point", 0, report.trace);

  for (int k = 0; k < cfg.max_iter; ++k) {
    if (res <= cfg.residual_tol) break;
    IterationRecord rec;
    rec.iter = k;
    rec.accepted = StepSource::Eg;
    rec.residual_ssn = std::numeric_limits<double>::quiet_NaN();
    try {
      v = timed(rec.phases.eg_ms, [&] { return eg_step(pd, v, cfg.eg); });
      res = timed(rec.phases.residual_ms,
                  [&] { return residual_eval(pd, v).norm; });
    } catch (const NumericError& e) {
      throw SolverError(std::string(e.what()) + " at iteration " +
                            std::to_string(k),
                        report.trace);
    }
    rec.residual = res;
    rec.residual_eg = res;
    rec.wall_time_ms = ms_since(start);
    report.trace.push_back(rec);
    check_finite(res, "extragradient iterate", k, report.trace);
    log::trace("eg iter {} res {:.3e}", k, res);
  }
  report.termination =
      res <= cfg.residual_tol ? Termination::Converged : Termination::MaxIter;
  finish(pd, v, res, report, start);
  log::info("eg: {} after {} iterations, residual {:.3e}, {:.1f} ms",
            to_string(report.termination), report.iterations,
            report.final_residual, report.total_ms);
  return report;
}

SolverReport run_method(Method method, const ProblemData& pd,
                        const SolverConfig& cfg) {
  return method == Method::Ssn ? solve(pd, cfg) : solve_eg(pd, cfg);
}

}  // namespace kot
