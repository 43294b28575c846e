#include <immintrin.h>

#include <cstdint>

#include "exp_constants.hpp"
#include "kernel_impl.hpp"

namespace sbs::kernels::avx2 {
namespace {

inline __m256d exp4(__m256d x) {
  using namespace detail;
  const __m256d lo = _mm256_set1_pd(kExpMin);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), _mm256_set1_pd(kExpMax));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r =
      _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi))),
                    _mm256_mul_pd(k, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 12; ++i)
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kInvFact[i]));
  const __m256d one = _mm256_set1_pd(1.0);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), one);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), one);
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(k64));
  return _mm256_andnot_pd(underflow, result);
}

void cover_row(const EdgeSet& e, double x0, double dx, double y, std::size_t n,
               std::uint8_t* mask) {
  const __m256d yv = _mm256_set1_pd(y);
  const __m256d a0 = _mm256_set1_pd(e.a[0]), a1 = _mm256_set1_pd(e.a[1]),
                a2 = _mm256_set1_pd(e.a[2]);
  const __m256d r0 = _mm256_mul_pd(_mm256_set1_pd(e.b[0]), yv);
  const __m256d r1 = _mm256_mul_pd(_mm256_set1_pd(e.b[1]), yv);
  const __m256d r2 = _mm256_mul_pd(_mm256_set1_pd(e.b[2]), yv);
  const __m256d c0 = _mm256_set1_pd(e.c[0]), c1 = _mm256_set1_pd(e.c[1]),
                c2 = _mm256_set1_pd(e.c[2]);
  const __m256d x0v = _mm256_set1_pd(x0), dxv = _mm256_set1_pd(dx);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
    const __m256d x = _mm256_add_pd(x0v, _mm256_mul_pd(idx, dxv));
    const __m256d e0 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(a0, x), r0), c0);
    const __m256d e1 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(a1, x), r1), c1);
    const __m256d e2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(a2, x), r2), c2);
    const __m256d in = _mm256_and_pd(
        _mm256_and_pd(_mm256_cmp_pd(e0, zero, _CMP_GE_OQ), _mm256_cmp_pd(e1, zero, _CMP_GE_OQ)),
        _mm256_cmp_pd(e2, zero, _CMP_GE_OQ));
    const int bits = _mm256_movemask_pd(in);
    if (bits == 0) continue;
    for (int j = 0; j < 4; ++j)
      if (bits & (1 << j)) mask[i + j] = 1;
  }
  for (; i < n; ++i) {
    const double x = x0 + static_cast<double>(i) * dx;
    const double e0 = (e.a[0] * x + e.b[0] * y) + e.c[0];
    const double e1 = (e.a[1] * x + e.b[1] * y) + e.c[1];
    const double e2 = (e.a[2] * x + e.b[2] * y) + e.c[2];
    if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) mask[i] = 1;
  }
}

void rate_batch(const double* beta, const double* area, const double* range,
                double visibility, double* out, std::size_t n) {
  const __m256d scale = _mm256_set1_pd(-detail::kRateConstant / visibility);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_loadu_pd(beta + i);
    const __m256d a = _mm256_loadu_pd(area + i);
    __m256d r = _mm256_loadu_pd(range + i);
    const __m256d live = _mm256_and_pd(_mm256_cmp_pd(b, zero, _CMP_GT_OQ),
                                       _mm256_cmp_pd(r, zero, _CMP_GT_OQ));
    r = _mm256_blendv_pd(one, r, live);
    const __m256d attenuation = exp4(_mm256_mul_pd(scale, r));
    const __m256d solid = _mm256_div_pd(a, _mm256_mul_pd(r, r));
    const __m256d lambda = _mm256_mul_pd(_mm256_mul_pd(b, solid), attenuation);
    _mm256_storeu_pd(out + i, _mm256_and_pd(live, lambda));
  }
  if (i < n) scalar::rate_batch(beta + i, area + i, range + i, visibility, out + i, n - i);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Isa::avx2, &cover_row, &rate_batch};
  return t;
}

}  // namespace sbs::kernels::avx2
