#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace kot {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Symmetric n x n matrices are plain Eigen matrices; producers call
// symmetrize() so that the stored entries are exactly symmetric.
using SymMatrix = Eigen::MatrixXd;

void symmetrize(Matrix& m);
Matrix symmetrized(const Matrix& m);

double frobenius_inner(const Matrix& a, const Matrix& b);

// Eigendecomposition Z = P diag(sigma) P^T with eigenvalues sorted in
// descending order (ties keep the eigensolver's order). Because of the
// ordering, the positive index set is always the leading block
// [0, num_positive) and its complement the trailing block.
struct SpectralDecomp {
  Matrix vecs;  // P, columns orthonormal
  Vector vals;  // sigma, descending
  Index num_positive = 0;

  Index order() const { return vals.size(); }
  Index num_nonpositive() const { return order() - num_positive; }

  auto pos_vecs() const { return vecs.leftCols(num_positive); }
  auto nonpos_vecs() const { return vecs.rightCols(num_nonpositive()); }

  std::vector<Index> pos_idx() const;
  std::vector<Index> nonpos_idx() const;

  Matrix reconstruct() const;
};

// Throws NumericError if the eigensolver does not converge or Z is not finite.
SpectralDecomp sym_eig(const Matrix& z);

struct CholeskyFactor {
  Matrix upper;  // R with R^T R = K + jitter_applied * I
  double jitter_applied = 0.0;
};

// Factorizes a (nearly) PSD Gram matrix, escalating a diagonal jitter from
// 0 to 1e-10 * tr(K)/n and then by factors of 10 up to 1e-6 * tr(K)/n.
// A pivot is rejected when its square falls below 1e-13 * tr(K)/n.
CholeskyFactor cholesky_psd(const Matrix& k);

using LinearOperator = std::function<Vector(const Vector&)>;

struct CgResult {
  Vector solution;
  int iterations = 0;
  double final_residual = 0.0;  // ||rhs - A x||_2 from the CG recursion
};

// Conjugate gradient for an SPD operator. Stops once the residual drops to
// tol * ||rhs|| or after max_iter iterations. Throws NumericError when an
// iterate becomes non-finite.
CgResult cg_solve(const LinearOperator& apply, const Vector& rhs, double tol,
                  int max_iter, const Vector* initial_guess = nullptr);

}  // namespace kot
