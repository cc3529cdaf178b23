#pragma once

// Regularized semismooth Newton direction for R(w) = 0.
//
// The (n^2 + n)-dimensional system (J + mu I) dw = -r is reduced by block
// elimination to one n x n SPD system
//
//   (Q/2l2 + mu I + Phi T Phi*) a1~ = a1,
//
// solved matrix-free by CG, with T the spectral operator of psd_cone.hpp.

#include "kot/linalg.hpp"
#include "kot/problem.hpp"
#include "kot/psd_cone.hpp"

#include <optional>

namespace kot {

struct NewtonConfig {
  double tau = 0.5;
  double kappa = 0.1;
  double alpha1 = 1e-6;
  double alpha2 = 1.0;
  double beta0 = 0.5;
  double beta1 = 1.2;
  double beta2 = 5.0;
  double theta_min = 1e-4;
  double theta_max = 1e4;
  int cg_max = 20;
  int cg_restarts = 2;
  // Fixed relative CG tolerance; when unset it is tau * min(1, kappa ||r||).
  std::optional<double> cg_tol;

  void validate() const;
};

struct NewtonContext {
  TOperator t_op;
  double theta = 1.0;

  double mu() const { return t_op.mu; }
  const OmegaStructure& omega() const { return t_op.omega; }
  const SpectralDecomp& z_eig() const { return t_op.omega.decomp; }
};

// mu = theta * residual_norm; z_eig is the decomposition of
// Z = X - (Phi*(gamma) + l1 I) at the current iterate.
NewtonContext make_newton_context(SpectralDecomp z_eig, double residual_norm,
                                  double theta);

struct NewtonStep {
  IteratePair dw;
  int cg_iters = 0;
  bool criterion_met = false;
  double system_residual = 0.0;  // ||(J + mu I)[dw] + r||
  double criterion_bound = 0.0;  // tau * min(1, kappa ||r|| ||dw||)
};

// Applies Q/2l2 + mu I + Phi T Phi* to v.
Vector newton_schur_operator(const ProblemData& pd, const NewtonContext& ctx,
                             const Vector& v);

NewtonStep newton_direction(const ProblemData& pd, const IteratePair& r,
                            const NewtonContext& ctx, const NewtonConfig& cfg);

// Inexactness test ||(J + mu I)[dw] + r|| <= tau min(1, kappa ||r|| ||dw||).
bool inexact_criterion_holds(double system_residual, double r_norm,
                             double dw_norm, const NewtonConfig& cfg,
                             double* bound = nullptr);

// Adaptive regularization weight from rho = -<R(w + dw), dw>.
double theta_update(double theta, double rho, double dw_norm_sq,
                    const NewtonConfig& cfg);

}  // namespace kot
