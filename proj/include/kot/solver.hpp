#pragma once

// Safeguarded semismooth Newton solver.
//
// Every iteration advances an extragradient sequence v_k by one step and
// computes one regularized Newton trial point w~ = w_k + dw_k; the iterate
// moves to whichever of w~ and v_{k+1} has the smaller residual norm. Hence
// ||R(w_k)|| <= ||R(v_k)|| for all k, which inherits the extragradient
// O(1/sqrt(k)) rate, while Newton steps dominate near the solution.

#include "kot/error.hpp"
#include "kot/extragradient.hpp"
#include "kot/newton.hpp"
#include "kot/problem.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace kot {

enum class Method { Ssn, Eg };
enum class StepSource { Ssn, Eg };
enum class Termination { Converged, MaxIter };

std::string_view to_string(Method m);
std::string_view to_string(StepSource s);
std::string_view to_string(Termination t);

struct NewtonProbe {
  int iter;
  const IteratePair& r;
  const NewtonContext& ctx;
  const NewtonStep& step;
};

struct SolverConfig {
  NewtonConfig newton;
  EgConfig eg;
  double residual_tol = 0.005;
  int max_iter = 500;
  std::uint64_t seed = 0;
  double theta0 = 1.0;
  // Called after each Newton direction with the residual it was computed
  // for; used by diagnostics that re-check the inexactness criterion.
  std::function<void(const NewtonProbe&)> newton_observer;

  void validate() const;
};

struct PhaseTimes {
  double eg_ms = 0.0;
  double direction_ms = 0.0;
  double residual_ms = 0.0;  // dominated by the eigendecomposition
};

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;      // ||R(w_{k+1})||, the accepted iterate
  double residual_eg = 0.0;   // ||R(v_{k+1})||
  double residual_ssn = 0.0;  // ||R(w_k + dw_k)||; NaN for pure EG runs
  StepSource accepted = StepSource::Eg;
  double theta = 0.0;  // theta_k used for this step
  double mu = 0.0;
  int cg_iters = 0;
  bool criterion_met = false;
  double system_residual = 0.0;
  double criterion_bound = 0.0;
  double dw_norm = 0.0;
  double wall_time_ms = 0.0;  // cumulative since solve() started
  PhaseTimes phases;
};

struct SolverReport {
  Method method = Method::Ssn;
  Vector gamma_hat;
  Matrix x_hat;
  double ot_estimate = 0.0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  double total_ms = 0.0;
  std::vector<IterationRecord> trace;
};

// Non-finite residual or a numeric breakdown inside an iteration; carries
// the trace up to the failure.
class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, std::vector<IterationRecord> trace)
      : NumericError(what), trace_(std::move(trace)) {}
  const std::vector<IterationRecord>& trace() const { return trace_; }

 private:
  std::vector<IterationRecord> trace_;
};

// (0, 0): gamma = 0 and X = proj_PSD(-(Phi*(0) + l1 I)) = 0.
IteratePair initial_point(const ProblemData& pd);

SolverReport solve(const ProblemData& pd, const SolverConfig& cfg);
// Pure extragradient baseline under the same termination rule.
SolverReport solve_eg(const ProblemData& pd, const SolverConfig& cfg);

SolverReport run_method(Method method, const ProblemData& pd,
                        const SolverConfig& cfg);

}  // namespace kot
