#include "kot/simd.hpp"
#include "simd_internal.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#include <cmath>
#include <limits>

#define KOT_AVX2 __attribute__((target("avx2,fma")))

namespace kot::simd {
namespace {

KOT_AVX2 void sq_dist_soa_avx2(const double* pts, std::size_t ld,
                               std::size_t count, std::size_t dim,
                               const double* query, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < dim; ++j) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(pts + j * ld + i),
                                         _mm256_set1_pd(query[j]));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = pts[j * ld + i] - query[j];
      acc = std::fma(diff, diff, acc);
    }
    out[i] = acc;
  }
}

// Cephes-style exp: x = k ln2 + r, |r| <= ln2/2, exp(r) from a (2,3) Pade
// form, then scaled by 2^k in two halves so |k| up to 1024 stays finite.
KOT_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(detail::kExpMinArg);
  const __m256d hi = _mm256_set1_pd(detail::kExpMaxArg);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d overflow = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d k = _mm256_round_pd(
      _mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  const __m128i k1 = _mm_srai_epi32(k32, 1);
  const __m128i k2 = _mm_sub_epi32(k32, k1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s1 = _mm256_castsi256_pd(_mm256_slli_epi64(
      _mm256_add_epi64(_mm256_cvtepi32_epi64(k1), bias), 52));
  const __m256d s2 = _mm256_castsi256_pd(_mm256_slli_epi64(
      _mm256_add_epi64(_mm256_cvtepi32_epi64(k2), bias), 52));
  e = _mm256_mul_pd(_mm256_mul_pd(e, s1), s2);

  e = _mm256_andnot_pd(underflow, e);
  return _mm256_blendv_pd(
      e, _mm256_set1_pd(std::numeric_limits<double>::infinity()), overflow);
}

KOT_AVX2 void exp_scaled_avx2(double* v, std::size_t count, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(v + i, exp_pd(_mm256_mul_pd(s, _mm256_loadu_pd(v + i))));
  }
  if (i < count) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t t = i; t < count; ++t) buf[t - i] = v[t];
    _mm256_store_pd(buf, exp_pd(_mm256_mul_pd(s, _mm256_load_pd(buf))));
    for (std::size_t t = i; t < count; ++t) v[t] = buf[t - i];
  }
}

KOT_AVX2 double dot_avx2(const double* a, const double* b, std::size_t count) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= count; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc),
                                  _mm256_extractf128_pd(acc, 1));
  double total = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < count; ++i) total = std::fma(a[i], b[i], total);
  return total;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::Avx2, &sq_dist_soa_avx2, &exp_scaled_avx2,
                                 &dot_avx2};
  return &table;
}

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace kot::simd

#else

namespace kot::simd {
const KernelTable* avx2_kernels() { return nullptr; }
bool cpu_has_avx2() { return false; }
}  // namespace kot::simd

#endif
