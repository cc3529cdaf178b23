#include "kot/newton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kot {

void NewtonConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0) || !(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("NewtonConfig: tau, kappa must lie in (0, 1)");
  }
  if (!(alpha1 > 0.0) || !(alpha2 >= alpha1)) {
    throw std::invalid_argument("NewtonConfig: need alpha2 >= alpha1 > 0");
  }
  if (!(beta0 > 0.0 && beta0 < 1.0) || !(beta1 > 0.0) || !(beta2 > 1.0)) {
    throw std::invalid_argument("NewtonConfig: need 0 < beta0 < 1 < beta2");
  }
  if (!(theta_min > 0.0) || !(theta_max >= theta_min)) {
    throw std::invalid_argument("NewtonConfig: need 0 < theta_min <= theta_max");
  }
  if (cg_max < 1 || cg_restarts < 0) {
    throw std::invalid_argument("NewtonConfig: bad CG limits");
  }
}

NewtonContext make_newton_context(SpectralDecomp z_eig, double residual_norm,
                                  double theta) {
  NewtonContext ctx;
  ctx.theta = theta;
  ctx.t_op = make_t_operator(build_omega(std::move(z_eig)),
                             theta * residual_norm);
  return ctx;
}

Vector newton_schur_operator(const ProblemData& pd, const NewtonContext& ctx,
                             const Vector& v) {
  return pd.q_mat * v / (2.0 * pd.lambda2) + ctx.mu() * v +
         phi_forward(pd, apply_t_operator(ctx.t_op, phi_adjoint(pd, v)));
}

bool inexact_criterion_holds(double system_residual, double r_norm,
                             double dw_norm, const NewtonConfig& cfg,
                             double* bound) {
  const double b = cfg.tau * std::min(1.0, cfg.kappa * r_norm * dw_norm);
  if (bound != nullptr) *bound = b;
  return system_residual <= b;
}

NewtonStep newton_direction(const ProblemData& pd, const IteratePair& r,
                            const NewtonContext& ctx, const NewtonConfig& cfg) {
  const double r_norm = r.norm();
  if (!(r_norm > 0.0)) {
    throw std::invalid_argument("newton_direction: residual must be nonzero");
  }
  const TOperator& t = ctx.t_op;
  const double mu = t.mu;
  const double inv_mu1 = 1.0 / (mu + 1.0);

  // Step 1: a = -C2 r.
  const Vector a1 = -r.gamma - inv_mu1 * phi_forward(pd, r.x + apply_t_operator(t, r.x));
  const Matrix a2 = -r.x;
  // Step 2: block-diagonal solve; the second block is explicit.
  const Matrix a2_tilde = inv_mu1 * (a2 + apply_t_operator(t, a2));

  const LinearOperator op = [&](const Vector& v) {
    return newton_schur_operator(pd, ctx, v);
  };
  double rel_tol = cfg.cg_tol.value_or(cfg.tau * std::min(1.0, cfg.kappa * r_norm));

  NewtonStep step;
  Vector a1_tilde = Vector::Zero(a1.size());
  for (int attempt = 0; attempt <= cfg.cg_restarts; ++attempt) {
    const CgResult cg =
        cg_solve(op, a1, rel_tol, cfg.cg_max, attempt > 0 ? &a1_tilde : nullptr);
    a1_tilde = cg.solution;
    step.cg_iters += cg.iterations;

    // Step 3: dw = C1 a~.
    step.dw.gamma = a1_tilde;
    step.dw.x = a2_tilde - apply_t_operator(t, phi_adjoint(pd, a1_tilde));
    symmetrize(step.dw.x);

    const IteratePair lhs = apply_jacobian(pd, ctx.omega(), mu, step.dw) + r;
    step.system_residual = lhs.norm();
    step.criterion_met = inexact_criterion_holds(
        step.system_residual, r_norm, step.dw.norm(), cfg, &step.criterion_bound);
    if (step.criterion_met || cfg.cg_tol.has_value()) break;
    rel_tol /= 10.0;
  }
  return step;
}

double theta_update(double theta, double rho, double dw_norm_sq,
                    const NewtonConfig& cfg) {
  double next;
  if (rho >= cfg.alpha2 * dw_norm_sq) {
    next = std::max(cfg.theta_min, cfg.beta0 * theta);
  } else if (rho >= cfg.alpha1 * dw_norm_sq) {
    next = cfg.beta1 * theta;
  } else {
    next = std::min(cfg.theta_max, cfg.beta2 * theta);
  }
  return std::clamp(next, cfg.theta_min, cfg.theta_max);
}

}  // namespace kot
