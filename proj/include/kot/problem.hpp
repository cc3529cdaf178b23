#pragma once

// The finite-dimensional dual instance
//
//   min_gamma (1/4l2) g^T Q g - (1/2l2) g^T z + q^2/(4l2)
//   s.t.      sum_i g_i Phi_i Phi_i^T + l1 I  PSD
//
// together with its nonsmooth residual map R(gamma, X) and the operators the
// Newton and extragradient solvers need.

#include "kot/kernels.hpp"
#include "kot/linalg.hpp"
#include "kot/psd_cone.hpp"

#include <span>

namespace kot {

struct FillingPoints {
  Matrix x_tilde;  // n x d
  Matrix y_tilde;  // n x d

  Index size() const { return x_tilde.rows(); }
  Index dim() const { return x_tilde.cols(); }
  void validate() const;
};

struct ProblemSpecs {
  KernelSpec x;
  KernelSpec y;
  KernelSpec xy;  // acts on concatenated (x, y) pairs in R^{2d}

  static ProblemSpecs gaussian(Index dim, double bandwidth_sq);
};

struct ProblemData {
  Matrix q_mat;          // Q, n x n
  Vector z;              // z_i = w_mu(x~_i) + w_nu(y~_i) - l2 ||x~_i - y~_i||^2
  double q_sq = 0.0;     // ||w_mu||^2 + ||w_nu||^2
  Matrix phi;            // R: upper Cholesky factor of K; Phi_i = phi.col(i)
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vector embedding_sum;  // w_mu(x~_i) + w_nu(y~_i)
  double jitter = 0.0;   // diagonal shift applied to K before factorizing
  FillingPoints filling;
  ProblemSpecs specs;

  Index order() const { return z.size(); }

  // Direct construction for hand-built instances; the embedding sum
  // defaults to z (i.e. no distance penalty) when omitted.
  static ProblemData from_matrices(Matrix q, Vector z, double q_sq,
                                   Matrix phi, double lambda1, double lambda2,
                                   Vector embedding_sum = Vector());
};

// w = (gamma, X). The norm is ||gamma||_2 + ||X||_F.
struct IteratePair {
  Vector gamma;
  Matrix x;

  static IteratePair zero(Index n);

  Index order() const { return gamma.size(); }
  double norm() const;

  IteratePair& operator+=(const IteratePair& o);
  IteratePair& operator-=(const IteratePair& o);
  IteratePair& operator*=(double s);
};

IteratePair operator+(IteratePair a, const IteratePair& b);
IteratePair operator-(IteratePair a, const IteratePair& b);
IteratePair operator*(double s, IteratePair a);

// gamma . gamma' + <X, X'>_F
double inner(const IteratePair& a, const IteratePair& b);

ProblemData assemble(const SampleSet& samples_mu, const SampleSet& samples_nu,
                     const FillingPoints& filling, double lambda1,
                     double lambda2, const ProblemSpecs& specs);

// Phi(X)_i = Phi_i^T X Phi_i.
Vector phi_forward(const ProblemData& pd, const Matrix& x);
// Phi*(gamma) = sum_i gamma_i Phi_i Phi_i^T.
Matrix phi_adjoint(const ProblemData& pd, const Vector& gamma);

// Phi*(gamma) + l1 I, the matrix the constraint keeps PSD.
Matrix constraint_matrix(const ProblemData& pd, const Vector& gamma);

double objective(const ProblemData& pd, const Vector& gamma);
// (1/2l2) Q gamma - (1/2l2) z.
Vector objective_gradient(const ProblemData& pd, const Vector& gamma);

// Residual value with the spectral decomposition of Z = X - (Phi*(g) + l1 I)
// it was computed from, so the Newton step can reuse it.
struct ResidualEval {
  IteratePair r;
  SpectralDecomp z_eig;
  double norm = 0.0;
};

ResidualEval residual_eval(const ProblemData& pd, const IteratePair& w);
IteratePair residual(const ProblemData& pd, const IteratePair& w);

// (J + mu I)[dw] with J the generalized Jacobian element built from Omega:
//   top    = (Q/2l2 + mu I) dg - Phi(dX)
//   bottom = M(Z)[Phi*(dg)] + (1 + mu) dX - M(Z)[dX]
IteratePair apply_jacobian(const ProblemData& pd, const OmegaStructure& omega,
                           double mu, const IteratePair& dw);

double ot_estimate(const ProblemData& pd, const Vector& gamma_hat);

struct PotentialEval {
  double u = 0.0;
  Vector grad_u;
  Vector map;  // T(x) = x - grad u(x)
};

// u(x) = (1/2l2) (w_mu(x) - sum_i gamma_i k_X(x~_i, x)) and its Monge map.
PotentialEval potential_and_map(const ProblemData& pd,
                                const SampleSet& samples_mu,
                                const Vector& gamma_hat,
                                std::span<const double> query);

}  // namespace kot
