#include "kot/simd.hpp"
#include "simd_internal.hpp"

#include <cmath>

namespace kot::simd {
namespace {

void sq_dist_soa_scalar(const double* pts, std::size_t ld, std::size_t count,
                        std::size_t dim, const double* query, double* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double* col = pts + j * ld;
    const double q = query[j];
    for (std::size_t i = 0; i < count; ++i) {
      const double diff = col[i] - q;
      out[i] += diff * diff;
    }
  }
}

void exp_scaled_scalar(double* v, std::size_t count, double scale) {
  for (std::size_t i = 0; i < count; ++i) {
    const double x = scale * v[i];
    v[i] = x < detail::kExpMinArg ? 0.0 : std::exp(x);
  }
}

double dot_scalar(const double* a, const double* b, std::size_t count) {
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, &sq_dist_soa_scalar,
                                 &exp_scaled_scalar, &dot_scalar};
  return table;
}

}  // namespace kot::simd
