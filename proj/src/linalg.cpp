#include "kot/linalg.hpp"

#include "kot/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kot {

void symmetrize(Matrix& m) {
  // Entry (i, j) and (j, i) both become 0.5 * (a + b) with the same
  // operands, so the result is exactly symmetric.
  const Matrix t = m.transpose();
  m = 0.5 * (m + t);
}

Matrix symmetrized(const Matrix& m) {
  Matrix out = m;
  symmetrize(out);
  return out;
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}

std::vector<Index> SpectralDecomp::pos_idx() const {
  std::vector<Index> idx(static_cast<std::size_t>(num_positive));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

std::vector<Index> SpectralDecomp::nonpos_idx() const {
  std::vector<Index> idx(static_cast<std::size_t>(num_nonpositive()));
  std::iota(idx.begin(), idx.end(), num_positive);
  return idx;
}

Matrix SpectralDecomp::reconstruct() const {
  return vecs * vals.asDiagonal() * vecs.transpose();
}

SpectralDecomp sym_eig(const Matrix& z) {
  if (z.rows() != z.cols()) {
    throw DimensionError("sym_eig: matrix is not square");
  }
  if (!z.allFinite()) {
    throw NumericError("sym_eig: non-finite input");
  }
  const Index n = z.rows();
  SpectralDecomp out;
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> es(z, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw NumericError("sym_eig: eigensolver failed to converge (||Z||_F = " +
                       std::to_string(z.norm()) + ")");
  }

  // Eigen returns ascending eigenvalues; re-sort descending, stable.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return ev(a) > ev(b); });

  out.vecs.resize(n, n);
  out.vals.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    out.vals(i) = ev(src);
    out.vecs.col(i) = es.eigenvectors().col(src);
  }
  out.num_positive = 0;
  while (out.num_positive < n && out.vals(out.num_positive) > 0.0) {
    ++out.num_positive;
  }
  return out;
}

namespace {

// Cholesky without Eigen's silent acceptance of tiny pivots.
bool try_factor(const Matrix& k, double jitter, double pivot_floor,
                Matrix& upper) {
  Matrix a = k;
  a.diagonal().array() += jitter;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  upper = llt.matrixU();
  return (upper.diagonal().array().square() > pivot_floor).all() &&
         upper.allFinite();
}

}  // namespace

CholeskyFactor cholesky_psd(const Matrix& k) {
  if (k.rows() != k.cols()) {
    throw DimensionError("cholesky_psd: matrix is not square");
  }
  if (!k.allFinite()) {
    throw NumericError("cholesky_psd: non-finite input");
  }
  const Index n = k.rows();
  CholeskyFactor out;
  if (n == 0) return out;

  const double scale = k.trace() / static_cast<double>(n);
  if (!(scale > 0.0)) {
    throw NumericError("kernel matrix numerically indefinite");
  }
  const double pivot_floor = 1e-13 * scale;
  const double cap = 1e-6 * scale;

  if (try_factor(k, 0.0, pivot_floor, out.upper)) return out;
  for (double jitter = 1e-10 * scale; jitter <= cap * (1.0 + 1e-12);
       jitter *= 10.0) {
    if (try_factor(k, jitter, pivot_floor, out.upper)) {
      out.jitter_applied = jitter;
      return out;
    }
  }
  throw NumericError("kernel matrix numerically indefinite");
}

CgResult cg_solve(const LinearOperator& apply, const Vector& rhs, double tol,
                  int max_iter, const Vector* initial_guess) {
  if (max_iter < 1) {
    throw std::invalid_argument("cg_solve: max_iter must be >= 1");
  }
  const Index n = rhs.size();
  if (initial_guess != nullptr && initial_guess->size() != n) {
    throw DimensionError("cg_solve: initial guess has wrong length");
  }

  CgResult out;
  out.solution = initial_guess != nullptr ? *initial_guess : Vector::Zero(n);
  const double rhs_norm = rhs.norm();
  if (!std::isfinite(rhs_norm)) {
    throw NumericError("cg_solve: non-finite right-hand side");
  }
  Vector r = rhs;
  if (initial_guess != nullptr) r -= apply(out.solution);
  double rr = r.squaredNorm();
  const double target = tol * rhs_norm;
  out.final_residual = std::sqrt(rr);
  if (out.final_residual <= target || rr == 0.0) return out;

  Vector p = r;
  while (out.iterations < max_iter) {
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (!std::isfinite(pap)) {
      throw NumericError("cg_solve: non-finite value in iteration " +
                         std::to_string(out.iterations));
    }
    if (pap <= 0.0) break;  // operator not positive definite along p
    const double step = rr / pap;
    out.solution.noalias() += step * p;
    r.noalias() -= step * ap;
    ++out.iterations;
    const double rr_next = r.squaredNorm();
    if (!std::isfinite(rr_next)) {
      throw NumericError("cg_solve: non-finite residual");
    }
    out.final_residual = std::sqrt(rr_next);
    if (out.final_residual <= target || rr_next == 0.0) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return out;
}

}  // namespace kot
