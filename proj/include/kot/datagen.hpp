#pragma once

// Synthetic instances: Gaussian-mixture samples and Sobol filling points.

#include "kot/kernels.hpp"
#include "kot/problem.hpp"

#include <cstdint>
#include <vector>

namespace kot {

struct MixtureComponent {
  double weight = 1.0;
  Vector mean;
  double isotropic_std = 0.1;
};

struct MixtureSpec {
  Index dim = 1;
  std::vector<MixtureComponent> components;
  std::uint64_t seed = 0;

  void validate() const;
};

// Uniform weights, means drawn uniformly from [0, 1]^dim, std 0.1.
MixtureSpec default_mixture(Index dim, int num_components, std::uint64_t seed);

SampleSet sample_mixture(const MixtureSpec& spec, Index count,
                         SampleRole role = SampleRole::SourceMu);

// Sobol points in natural (binary counting) order with the Joe-Kuo
// direction numbers. Index 0 is the origin.
class SobolStream {
 public:
  static constexpr int kMaxDim = 64;

  explicit SobolStream(int dim, std::uint64_t index = 0);

  int dim() const { return dim_; }
  std::uint64_t index() const { return index_; }

  // Point at the current index in [0, 1)^dim, then advances.
  std::vector<double> next();
  static std::vector<double> point(int dim, std::uint64_t index);

 private:
  int dim_;
  std::uint64_t index_;
};

struct Box {
  Vector lo;
  Vector hi;

  static Box unit(Index dim);
  // Bounding box of the rows of `pts`, each side widened by `inflate`
  // times its extent (half on each end).
  static Box bounding(const Matrix& pts, double inflate);
};

// n filling pairs from the 2d-dimensional Sobol sequence, skipping the
// origin: the first d coordinates map affinely into x_box, the last d into
// y_box.
FillingPoints sobol_points(Index d, Index count, const Box& x_box,
                           const Box& y_box);

}  // namespace kot
