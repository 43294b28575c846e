#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernel_impl.hpp"

namespace sbs::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
#if defined(SBS_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) return &avx2::table();
#endif
      return nullptr;
    case Isa::neon:
#if defined(SBS_HAVE_NEON)
      return &neon::table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("SBS_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == isa_name(isa))
        if (const auto* t = kernels_for(isa)) return *t;
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (const auto* t = kernels_for(isa)) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

void rate_batch(std::span<const double> beta, std::span<const double> area,
                std::span<const double> range, double visibility,
                std::span<double> out) {
  const std::size_t n = out.size();
  if (beta.size() != n || area.size() != n || range.size() != n)
    throw std::invalid_argument("rate_batch: span sizes differ");
  active().rate_batch(beta.data(), area.data(), range.data(), visibility, out.data(), n);
}

}  // namespace sbs::kernels
