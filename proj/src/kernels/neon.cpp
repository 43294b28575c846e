#include <arm_neon.h>

#include <cstdint>

#include "exp_constants.hpp"
#include "kernel_impl.hpp"

namespace sbs::kernels::neon {
namespace {

inline float64x2_t exp2v(float64x2_t x) {
  using namespace detail;
  const float64x2_t lo = vdupq_n_f64(kExpMin);
  const uint64x2_t underflow = vcltq_f64(x, lo);
  x = vminq_f64(vmaxq_f64(x, lo), vdupq_n_f64(kExpMax));
  const float64x2_t k = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(kLog2e)));
  const float64x2_t r = vsubq_f64(vsubq_f64(x, vmulq_f64(k, vdupq_n_f64(kLn2Hi))),
                                  vmulq_f64(k, vdupq_n_f64(kLn2Lo)));
  float64x2_t p = vdupq_n_f64(kInvFact[0]);
  for (int i = 1; i < 12; ++i) p = vaddq_f64(vmulq_f64(p, r), vdupq_n_f64(kInvFact[i]));
  const float64x2_t one = vdupq_n_f64(1.0);
  p = vaddq_f64(vmulq_f64(p, r), one);
  p = vaddq_f64(vmulq_f64(p, r), one);
  int64x2_t k64 = vcvtq_s64_f64(k);
  k64 = vshlq_n_s64(vaddq_s64(k64, vdupq_n_s64(1023)), 52);
  const float64x2_t result = vmulq_f64(p, vreinterpretq_f64_s64(k64));
  return vreinterpretq_f64_u64(
      vbicq_u64(vreinterpretq_u64_f64(result), underflow));
}

void cover_row(const EdgeSet& e, double x0, double dx, double y, std::size_t n,
               std::uint8_t* mask) {
  const float64x2_t yv = vdupq_n_f64(y);
  float64x2_t a[3], r[3], c[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = vdupq_n_f64(e.a[k]);
    r[k] = vmulq_f64(vdupq_n_f64(e.b[k]), yv);
    c[k] = vdupq_n_f64(e.c[k]);
  }
  const float64x2_t x0v = vdupq_n_f64(x0), dxv = vdupq_n_f64(dx);
  const double lanes[2] = {0.0, 1.0};
  const float64x2_t lane = vld1q_f64(lanes);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t idx = vaddq_f64(vdupq_n_f64(static_cast<double>(i)), lane);
    const float64x2_t x = vaddq_f64(x0v, vmulq_f64(idx, dxv));
    uint64x2_t in = vdupq_n_u64(~0ULL);
    for (int k = 0; k < 3; ++k) {
      const float64x2_t ek = vaddq_f64(vaddq_f64(vmulq_f64(a[k], x), r[k]), c[k]);
      in = vandq_u64(in, vcgeq_f64(ek, zero));
    }
    if (vgetq_lane_u64(in, 0)) mask[i] = 1;
    if (vgetq_lane_u64(in, 1)) mask[i + 1] = 1;
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
  const float64x2_t scale = vdupq_n_f64(-detail::kRateConstant / visibility);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t b = vld1q_f64(beta + i);
    const float64x2_t a = vld1q_f64(area + i);
    float64x2_t r = vld1q_f64(range + i);
    const uint64x2_t live = vandq_u64(vcgtq_f64(b, zero), vcgtq_f64(r, zero));
    r = vbslq_f64(live, r, one);
    const float64x2_t attenuation = exp2v(vmulq_f64(scale, r));
    const float64x2_t solid = vdivq_f64(a, vmulq_f64(r, r));
    const float64x2_t lambda = vmulq_f64(vmulq_f64(b, solid), attenuation);
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(live, vreinterpretq_u64_f64(lambda))));
  }
  if (i < n) scalar::rate_batch(beta + i, area + i, range + i, visibility, out + i, n - i);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Isa::neon, &cover_row, &rate_batch};
  return t;
}

}  // namespace sbs::kernels::neon
