#include "kot/kernels.hpp"

#include "kot/error.hpp"
#include "kot/simd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kot {
namespace {

double neg_inv_two_sigma_sq(const KernelSpec& spec) {
  return -1.0 / (2.0 * spec.bandwidth_sq);
}

// Row `row` of the kernel block between a query and a point set stored as
// rows of `pts` (column-major, so each coordinate column is contiguous).
void kernel_row(const KernelSpec& spec, const Matrix& pts,
                std::span<const double> query, std::span<double> out) {
  simd::sq_dist_soa(pts.data(), static_cast<std::size_t>(pts.rows()),
                    static_cast<std::size_t>(pts.rows()),
                    static_cast<std::size_t>(pts.cols()), query, out);
  simd::exp_scaled(out, neg_inv_two_sigma_sq(spec));
}

void check_dim(const KernelSpec& spec, Index d, const char* what) {
  if (d != spec.input_dim) {
    throw DimensionError(std::string(what) + ": point dimension " +
                         std::to_string(d) + " != kernel input_dim " +
                         std::to_string(spec.input_dim));
  }
}

void check_nonempty(const SampleSet& s, const char* what) {
  if (s.size() == 0) {
    throw std::invalid_argument(std::string(what) + ": empty sample set");
  }
}

}  // namespace

void KernelSpec::validate() const {
  if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq)) {
    throw std::invalid_argument("KernelSpec: bandwidth_sq must be positive");
  }
  if (input_dim < 1) {
    throw std::invalid_argument("KernelSpec: input_dim must be positive");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a,
                   std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("kernel_eval: point dimensions differ");
  }
  check_dim(spec, static_cast<Index>(a.size()), "kernel_eval");
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sq += diff * diff;
  }
  return std::exp(neg_inv_two_sigma_sq(spec) * sq);
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& pts_a,
                   const Matrix& pts_b) {
  check_dim(spec, pts_a.cols(), "gram_matrix");
  check_dim(spec, pts_b.cols(), "gram_matrix");
  // Built column by column: column j holds k(., b_j) against all of pts_a.
  Matrix out(pts_a.rows(), pts_b.rows());
  Vector query(pts_b.cols());
  for (Index j = 0; j < pts_b.rows(); ++j) {
    query = pts_b.row(j).transpose();
    kernel_row(spec, pts_a, {query.data(), static_cast<std::size_t>(query.size())},
               {out.col(j).data(), static_cast<std::size_t>(out.rows())});
  }
  if (&pts_a == &pts_b || (pts_a.rows() == pts_b.rows() && pts_a == pts_b)) {
    symmetrize(out);
  }
  return out;
}

double mean_embedding_at(const KernelSpec& spec, const SampleSet& samples,
                         std::span<const double> query) {
  check_nonempty(samples, "mean_embedding_at");
  check_dim(spec, samples.dim(), "mean_embedding_at");
  check_dim(spec, static_cast<Index>(query.size()), "mean_embedding_at");
  Vector vals(samples.size());
  kernel_row(spec, samples.points, query,
             {vals.data(), static_cast<std::size_t>(vals.size())});
  return vals.sum() / static_cast<double>(samples.size());
}

Vector mean_embedding(const KernelSpec& spec, const SampleSet& samples,
                      const Matrix& queries) {
  check_nonempty(samples, "mean_embedding");
  const Matrix block = gram_matrix(spec, samples.points, queries);
  return block.colwise().sum().transpose() /
         static_cast<double>(samples.size());
}

double embedding_norm_sq(const KernelSpec& spec, const SampleSet& samples) {
  check_nonempty(samples, "embedding_norm_sq");
  const Matrix g = gram_matrix(spec, samples.points, samples.points);
  const double n = static_cast<double>(samples.size());
  return g.sum() / (n * n);
}

}  // namespace kot
