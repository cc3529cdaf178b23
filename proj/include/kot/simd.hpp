#pragma once

// Data-parallel inner loops shared by kernel assembly and the Phi operator.
//
// Each kernel has a scalar reference implementation and an AVX2+FMA variant.
// The variant is chosen once at runtime from CPUID; setting the environment
// variable KOT_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace kot::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;

  // out[i] = sum_j (pts[j * ld + i] - query[j])^2 for i < count, j < dim.
  // Points are stored structure-of-arrays: coordinate j of all points is
  // contiguous (column j of a column-major count x dim matrix).
  void (*sq_dist_soa)(const double* pts, std::size_t ld, std::size_t count,
                      std::size_t dim, const double* query, double* out);

  // v[i] = exp(scale * v[i]). Results below the normal range flush to 0.
  void (*exp_scaled)(double* v, std::size_t count, double scale);

  double (*dot)(const double* a, const double* b, std::size_t count);
};

const KernelTable& scalar_kernels();
// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

// The table selected for this process.
const KernelTable& active();

bool cpu_has_avx2();
std::string_view isa_name(Isa isa);

// Convenience wrappers over active().
void sq_dist_soa(const double* pts, std::size_t ld, std::size_t count,
                 std::size_t dim, std::span<const double> query,
                 std::span<double> out);
void exp_scaled(std::span<double> v, double scale);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace kot::simd
