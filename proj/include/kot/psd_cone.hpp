#pragma once

// Projection onto the PSD cone and the spectral operators built on it.
//
// For Z = P diag(sigma) P^T with positive block alpha and nonpositive block
// abar, the operators here all have the form
//
//   S -> P (W o (P^T S P)) P^T,   W = [ c*E   B ]
//                                     [ B^T   0 ]
//
// with a scalar c on the alpha x alpha block and an |alpha| x |abar| block B.
// The projection Jacobian uses (c, B) = (1, eta); the T-operator of the
// Newton system uses (1/mu, xi). Both are applied through low-rank factors
// in O(min(|alpha|, |abar|) n^2) flops without forming P^T S P.

#include "kot/linalg.hpp"

namespace kot {

Matrix proj_psd(const Matrix& z);
Matrix proj_psd(const SpectralDecomp& decomp);

struct OmegaStructure {
  SpectralDecomp decomp;
  Matrix eta;  // |alpha| x |abar|, eta_ij = sigma_i / (sigma_i - sigma_j)
};

OmegaStructure build_omega(SpectralDecomp decomp);

// M(Z)[S] = P (Omega o (P^T S P)) P^T.
Matrix apply_proj_jacobian(const OmegaStructure& omega, const Matrix& s);

enum class TPath { LowRankAlpha, ComplementAlphaBar };

struct TOperator {
  OmegaStructure omega;
  double mu = 0.0;
  Matrix xi;  // xi_ij = eta_ij / (mu + 1 - eta_ij)
  TPath path = TPath::LowRankAlpha;
};

// Selects LowRankAlpha iff |alpha| <= |abar|. Requires mu > 0.
TOperator make_t_operator(OmegaStructure omega, double mu);

Matrix apply_t_operator(const TOperator& t, const Matrix& s);
// Same operator through an explicitly chosen path.
Matrix apply_t_operator(const TOperator& t, const Matrix& s, TPath path);

}  // namespace kot
