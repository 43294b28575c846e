#include <bit>
#include <cmath>
#include <cstdint>

#include "exp_constants.hpp"
#include "kernel_impl.hpp"
#include "sbs/kernels/kernels.hpp"

namespace sbs::kernels {

double kernel_exp(double x) {
  using namespace detail;
  if (!(x >= kExpMin)) return x != x ? x : 0.0;
  if (x > kExpMax) x = kExpMax;
  const double k = std::nearbyint(x * kLog2e);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  double p = kInvFact[0];
  for (int i = 1; i < 12; ++i) p = p * r + kInvFact[i];
  p = p * r + 1.0;
  p = p * r + 1.0;
  const auto bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 1023) << 52;
  return p * std::bit_cast<double>(bits);
}

namespace scalar {

void cover_row(const EdgeSet& e, double x0, double dx, double y, std::size_t n,
               std::uint8_t* mask) {
  const double r0 = e.b[0] * y;
  const double r1 = e.b[1] * y;
  const double r2 = e.b[2] * y;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + static_cast<double>(i) * dx;
    const double e0 = (e.a[0] * x + r0) + e.c[0];
    const double e1 = (e.a[1] * x + r1) + e.c[1];
    const double e2 = (e.a[2] * x + r2) + e.c[2];
    if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) mask[i] = 1;
  }
}

void rate_batch(const double* beta, const double* area, const double* range,
                double visibility, double* out, std::size_t n) {
  const double scale = -detail::kRateConstant / visibility;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = range[i];
    if (!(beta[i] > 0.0) || !(r > 0.0)) {
      out[i] = 0.0;
      continue;
    }
    const double attenuation = kernel_exp(scale * r);
    const double solid = area[i] / (r * r);
    out[i] = (beta[i] * solid) * attenuation;
  }
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, &scalar::cover_row, &scalar::rate_batch};
  return table;
}

}  // namespace sbs::kernels
