#include "kot/simd.hpp"

#include <cassert>
#include <cstdlib>
#include <string>

namespace kot::simd {
namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("KOT_SIMD");
      env != nullptr && std::string(env) == "scalar") {
    return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels(); t != nullptr && cpu_has_avx2()) {
    return *t;
  }
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

void sq_dist_soa(const double* pts, std::size_t ld, std::size_t count,
                 std::size_t dim, std::span<const double> query,
                 std::span<double> out) {
  assert(query.size() >= dim && out.size() >= count);
  active().sq_dist_soa(pts, ld, count, dim, query.data(), out.data());
}

void exp_scaled(std::span<double> v, double scale) {
  active().exp_scaled(v.data(), v.size(), scale);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

}  // namespace kot::simd
