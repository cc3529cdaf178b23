#include "kot/psd_cone.hpp"

#include "kot/error.hpp"

#include <cassert>
#include <stdexcept>

namespace kot {
namespace {

void check_square(const Matrix& s, Index n, const char* what) {
  if (s.rows() != n || s.cols() != n) {
    throw DimensionError(std::string(what) + ": operand has wrong order");
  }
}

// Lead * ((diag/2) (Lead^T S Lead) Lead^T + (off o (Lead^T S Rest)) Rest^T),
// the half of the two-block Hadamard operator that G + G^T completes.
template <typename LeadCols, typename RestCols>
Matrix half_block(const LeadCols& lead, const RestCols& rest, double diag,
                  const Matrix& off, const Matrix& s) {
  const Matrix u = lead.transpose() * s;  // k x n
  Matrix inner = (0.5 * diag) * ((u * lead) * lead.transpose());
  if (rest.cols() > 0) {
    inner.noalias() += off.cwiseProduct(u * rest) * rest.transpose();
  }
  return lead * inner;
}

// P (W o (P^T S P)) P^T for W = [diag*E, off; off^T, 0] with the leading
// block spanned by `lead`.
template <typename LeadCols, typename RestCols>
Matrix two_block(const LeadCols& lead, const RestCols& rest, double diag,
                 const Matrix& off, const Matrix& s) {
  if (lead.cols() == 0) return Matrix::Zero(s.rows(), s.cols());
  const Matrix g = half_block(lead, rest, diag, off, s);
  if (s == s.transpose()) {
    Matrix out = g + g.transpose();
    return out;
  }
  // Non-symmetric operand: G(S) + G(S^T)^T.
  const Matrix st = s.transpose();
  return g + half_block(lead, rest, diag, off, st).transpose();
}

// Applies the operator through whichever block is smaller. When the
// positive block is larger it uses
//   P (W o M) P^T = diag * S - P ((diag*E - W) o M) P^T,
// where diag*E - W has zero alpha x alpha block, so it is again two-block
// with the roles of alpha and abar exchanged.
Matrix apply_spectral(const SpectralDecomp& d, double diag, const Matrix& off,
                      const Matrix& s, bool complement) {
  check_square(s, d.order(), "spectral operator");
  if (d.num_positive == 0) return Matrix::Zero(s.rows(), s.cols());
  if (!complement) {
    return two_block(d.pos_vecs(), d.nonpos_vecs(), diag, off, s);
  }
  if (d.num_nonpositive() == 0) return diag * s;
  const Matrix swapped_off =
      (Matrix::Constant(off.rows(), off.cols(), diag) - off).transpose();
  Matrix out = diag * s;
  out -= two_block(d.nonpos_vecs(), d.pos_vecs(), diag, swapped_off, s);
  return out;
}

bool prefer_complement(const SpectralDecomp& d) {
  return d.num_positive > d.num_nonpositive();
}

}  // namespace

Matrix proj_psd(const SpectralDecomp& decomp) {
  const auto p = decomp.pos_vecs();
  Matrix out = p * decomp.vals.head(decomp.num_positive).asDiagonal() *
               p.transpose();
  symmetrize(out);
  return out;
}

Matrix proj_psd(const Matrix& z) { return proj_psd(sym_eig(z)); }

OmegaStructure build_omega(SpectralDecomp decomp) {
  OmegaStructure out;
  const Index k = decomp.num_positive;
  const Index m = decomp.num_nonpositive();
  out.eta.resize(k, m);
  for (Index j = 0; j < m; ++j) {
    const double sj = decomp.vals(k + j);
    for (Index i = 0; i < k; ++i) {
      const double si = decomp.vals(i);
      const double denom = si - sj;
      assert(denom > 0.0);
      out.eta(i, j) = si / denom;
    }
  }
  out.decomp = std::move(decomp);
  return out;
}

Matrix apply_proj_jacobian(const OmegaStructure& omega, const Matrix& s) {
  return apply_spectral(omega.decomp, 1.0, omega.eta, s,
                        prefer_complement(omega.decomp));
}

TOperator make_t_operator(OmegaStructure omega, double mu) {
  if (!(mu > 0.0)) {
    throw std::invalid_argument("make_t_operator: mu must be positive");
  }
  TOperator t;
  t.mu = mu;
  t.xi = omega.eta.unaryExpr(
      [mu](double eta) { return eta / (mu + 1.0 - eta); });
  t.path = prefer_complement(omega.decomp) ? TPath::ComplementAlphaBar
                                           : TPath::LowRankAlpha;
  t.omega = std::move(omega);
  return t;
}

Matrix apply_t_operator(const TOperator& t, const Matrix& s, TPath path) {
  return apply_spectral(t.omega.decomp, 1.0 / t.mu, t.xi, s,
                        path == TPath::ComplementAlphaBar);
}

Matrix apply_t_operator(const TOperator& t, const Matrix& s) {
  return apply_t_operator(t, s, t.path);
}

}  // namespace kot
