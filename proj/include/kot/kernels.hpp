#pragma once

#include "kot/linalg.hpp"

#include <span>

namespace kot {

enum class KernelFamily { Gaussian };

// k(a, b) = exp(-||a - b||^2 / (2 sigma^2)).
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth_sq = 0.005;
  Index input_dim = 1;

  void validate() const;
};

enum class SampleRole { SourceMu, TargetNu };

struct SampleSet {
  Matrix points;  // n_sample x d, one point per row
  SampleRole role = SampleRole::SourceMu;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

double kernel_eval(const KernelSpec& spec, std::span<const double> a,
                   std::span<const double> b);

// Entry (i, j) = k(row i of pts_a, row j of pts_b).
Matrix gram_matrix(const KernelSpec& spec, const Matrix& pts_a,
                   const Matrix& pts_b);

// (1/n_sample) sum_j k(x_j, query).
double mean_embedding_at(const KernelSpec& spec, const SampleSet& samples,
                         std::span<const double> query);
// mean_embedding_at for every row of `queries`.
Vector mean_embedding(const KernelSpec& spec, const SampleSet& samples,
                      const Matrix& queries);

// (1/n_sample^2) sum_{i,j} k(x_i, x_j).
double embedding_norm_sq(const KernelSpec& spec, const SampleSet& samples);

}  // namespace kot
