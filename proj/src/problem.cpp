#include "kot/problem.hpp"

#include "kot/error.hpp"
#include "kot/simd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kot {
namespace {

void check_order(const ProblemData& pd, Index n, const char* what) {
  if (n != pd.order()) {
    throw DimensionError(std::string(what) + ": expected order " +
                         std::to_string(pd.order()) + ", got " +
                         std::to_string(n));
  }
}

void check_square_order(const ProblemData& pd, const Matrix& m,
                        const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  check_order(pd, m.rows(), what);
}

}  // namespace

void FillingPoints::validate() const {
  if (x_tilde.rows() < 1 || x_tilde.rows() != y_tilde.rows()) {
    throw DimensionError("FillingPoints: need n >= 1 rows in both blocks");
  }
  if (x_tilde.cols() != y_tilde.cols()) {
    throw DimensionError("FillingPoints: x and y blocks differ in dimension");
  }
}

ProblemSpecs ProblemSpecs::gaussian(Index dim, double bandwidth_sq) {
  ProblemSpecs s;
  s.x = {KernelFamily::Gaussian, bandwidth_sq, dim};
  s.y = {KernelFamily::Gaussian, bandwidth_sq, dim};
  s.xy = {KernelFamily::Gaussian, bandwidth_sq, 2 * dim};
  return s;
}

ProblemData ProblemData::from_matrices(Matrix q, Vector z, double q_sq,
                                       Matrix phi, double lambda1,
                                       double lambda2, Vector embedding_sum) {
  const Index n = z.size();
  if (q.rows() != n || q.cols() != n || phi.rows() != n || phi.cols() != n) {
    throw DimensionError("ProblemData::from_matrices: inconsistent orders");
  }
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
    throw std::invalid_argument("ProblemData: lambda1, lambda2 must be > 0");
  }
  ProblemData pd;
  pd.q_mat = std::move(q);
  symmetrize(pd.q_mat);
  pd.embedding_sum = embedding_sum.size() == n ? std::move(embedding_sum) : z;
  pd.z = std::move(z);
  pd.q_sq = q_sq;
  pd.phi = std::move(phi);
  pd.lambda1 = lambda1;
  pd.lambda2 = lambda2;
  return pd;
}

IteratePair IteratePair::zero(Index n) {
  return {Vector::Zero(n), Matrix::Zero(n, n)};
}

double IteratePair::norm() const { return gamma.norm() + x.norm(); }

IteratePair& IteratePair::operator+=(const IteratePair& o) {
  gamma += o.gamma;
  x += o.x;
  return *this;
}

IteratePair& IteratePair::operator-=(const IteratePair& o) {
  gamma -= o.gamma;
  x -= o.x;
  return *this;
}

IteratePair& IteratePair::operator*=(double s) {
  gamma *= s;
  x *= s;
  return *this;
}

IteratePair operator+(IteratePair a, const IteratePair& b) { return a += b; }
IteratePair operator-(IteratePair a, const IteratePair& b) { return a -= b; }
IteratePair operator*(double s, IteratePair a) { return a *= s; }

double inner(const IteratePair& a, const IteratePair& b) {
  return a.gamma.dot(b.gamma) + frobenius_inner(a.x, b.x);
}

ProblemData assemble(const SampleSet& samples_mu, const SampleSet& samples_nu,
                     const FillingPoints& filling, double lambda1,
                     double lambda2, const ProblemSpecs& specs) {
  filling.validate();
  specs.x.validate();
  specs.y.validate();
  specs.xy.validate();
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
    throw std::invalid_argument("assemble: lambda1, lambda2 must be > 0");
  }
  if (samples_mu.dim() != filling.dim() || samples_nu.dim() != filling.dim()) {
    throw DimensionError("assemble: samples and filling points differ in dim");
  }

  const Matrix& xt = filling.x_tilde;
  const Matrix& yt = filling.y_tilde;
  Matrix q = gram_matrix(specs.x, xt, xt) + gram_matrix(specs.y, yt, yt);

  const Vector w_mu = mean_embedding(specs.x, samples_mu, xt);
  const Vector w_nu = mean_embedding(specs.y, samples_nu, yt);
  Vector emb = w_mu + w_nu;
  Vector z = emb - lambda2 * (xt - yt).rowwise().squaredNorm();
  const double q_sq = embedding_norm_sq(specs.x, samples_mu) +
                      embedding_norm_sq(specs.y, samples_nu);

  Matrix pairs(xt.rows(), xt.cols() + yt.cols());
  pairs << xt, yt;
  CholeskyFactor chol = cholesky_psd(gram_matrix(specs.xy, pairs, pairs));
  // Far-apart pairs leave entries like 1e-250 in R whose products underflow
  // to subnormals and stall every later GEMM. Below sqrt(DBL_MIN) relative
  // to the O(1) diagonal they carry no information.
  const double floor = std::sqrt(std::numeric_limits<double>::min()) *
                       chol.upper.cwiseAbs().maxCoeff();
  chol.upper = (chol.upper.array().abs() < floor).select(0.0, chol.upper);

  ProblemData pd = ProblemData::from_matrices(
      std::move(q), std::move(z), q_sq, std::move(chol.upper), lambda1,
      lambda2, std::move(emb));
  pd.jitter = chol.jitter_applied;
  pd.filling = filling;
  pd.specs = specs;
  return pd;
}

Vector phi_forward(const ProblemData& pd, const Matrix& x) {
  check_square_order(pd, x, "phi_forward");
  const Index n = pd.order();
  // X R, then the i-th output is the dot of column i of R with column i of
  // X R; column i of R is zero below row i.
  const Matrix xr = x * pd.phi.triangularView<Eigen::Upper>();
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    const auto len = static_cast<std::size_t>(i + 1);
    out(i) = simd::dot({pd.phi.col(i).data(), len}, {xr.col(i).data(), len});
  }
  return out;
}

Matrix phi_adjoint(const ProblemData& pd, const Vector& gamma) {
  check_order(pd, gamma.size(), "phi_adjoint");
  // R diag(gamma) R^T with R upper triangular.
  const Matrix scaled = pd.phi * gamma.asDiagonal();
  Matrix out = scaled.triangularView<Eigen::Upper>() * pd.phi.transpose();
  symmetrize(out);
  return out;
}

Matrix constraint_matrix(const ProblemData& pd, const Vector& gamma) {
  Matrix c = phi_adjoint(pd, gamma);
  c.diagonal().array() += pd.lambda1;
  return c;
}

Vector objective_gradient(const ProblemData& pd, const Vector& gamma) {
  check_order(pd, gamma.size(), "objective_gradient");
  return (pd.q_mat * gamma - pd.z) / (2.0 * pd.lambda2);
}

double objective(const ProblemData& pd, const Vector& gamma) {
  check_order(pd, gamma.size(), "objective");
  const double l2 = pd.lambda2;
  return gamma.dot(pd.q_mat * gamma) / (4.0 * l2) -
         gamma.dot(pd.z) / (2.0 * l2) + pd.q_sq / (4.0 * l2);
}

ResidualEval residual_eval(const ProblemData& pd, const IteratePair& w) {
  check_order(pd, w.gamma.size(), "residual");
  check_square_order(pd, w.x, "residual");
  ResidualEval out;
  out.r.gamma = objective_gradient(pd, w.gamma) - phi_forward(pd, w.x);
  Matrix z = w.x - constraint_matrix(pd, w.gamma);
  symmetrize(z);
  out.z_eig = sym_eig(z);
  out.r.x = w.x - proj_psd(out.z_eig);
  out.norm = out.r.norm();
  return out;
}

IteratePair residual(const ProblemData& pd, const IteratePair& w) {
  return residual_eval(pd, w).r;
}

IteratePair apply_jacobian(const ProblemData& pd, const OmegaStructure& omega,
                           double mu, const IteratePair& dw) {
  check_order(pd, dw.gamma.size(), "apply_jacobian");
  check_square_order(pd, dw.x, "apply_jacobian");
  if (omega.decomp.order() != pd.order()) {
    throw DimensionError("apply_jacobian: Omega has wrong order");
  }
  IteratePair out;
  out.gamma = pd.q_mat * dw.gamma / (2.0 * pd.lambda2) + mu * dw.gamma -
              phi_forward(pd, dw.x);
  out.x = (1.0 + mu) * dw.x +
          apply_proj_jacobian(omega, phi_adjoint(pd, dw.gamma) - dw.x);
  return out;
}

double ot_estimate(const ProblemData& pd, const Vector& gamma_hat) {
  check_order(pd, gamma_hat.size(), "ot_estimate");
  return pd.q_sq / (2.0 * pd.lambda2) -
         gamma_hat.dot(pd.embedding_sum) / (2.0 * pd.lambda2);
}

PotentialEval potential_and_map(const ProblemData& pd,
                                const SampleSet& samples_mu,
                                const Vector& gamma_hat,
                                std::span<const double> query) {
  check_order(pd, gamma_hat.size(), "potential_and_map");
  const KernelSpec& spec = pd.specs.x;
  const Index d = spec.input_dim;
  if (static_cast<Index>(query.size()) != d || samples_mu.dim() != d ||
      pd.filling.dim() != d) {
    throw DimensionError("potential_and_map: query dimension mismatch");
  }
  if (samples_mu.size() == 0) {
    throw std::invalid_argument("potential_and_map: empty sample set");
  }
  const Eigen::Map<const Vector> x(query.data(), d);
  const Matrix xq = x.transpose();

  // Both sums share the form sum_j c_j k(p_j, x) and its gradient
  // sum_j c_j k(p_j, x) (p_j - x) / sigma^2.
  const double inv_ns = 1.0 / static_cast<double>(samples_mu.size());
  const Vector k_mu = gram_matrix(spec, samples_mu.points, xq).col(0);
  const Vector k_fill = gram_matrix(spec, pd.filling.x_tilde, xq).col(0);
  const Vector c_mu = inv_ns * k_mu;
  const Vector c_fill = gamma_hat.cwiseProduct(k_fill);

  const double scale = 1.0 / (2.0 * pd.lambda2);
  PotentialEval out;
  out.u = scale * (c_mu.sum() - c_fill.sum());
  const Vector g_mu =
      (samples_mu.points.transpose() * c_mu - c_mu.sum() * x) /
      spec.bandwidth_sq;
  const Vector g_fill =
      (pd.filling.x_tilde.transpose() * c_fill - c_fill.sum() * x) /
      spec.bandwidth_sq;
  out.grad_u = scale * (g_mu - g_fill);
  out.map = x - out.grad_u;
  return out;
}

}  // namespace kot
