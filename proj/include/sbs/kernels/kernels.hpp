#pragma once

// Data-parallel inner loops with a scalar reference implementation and SIMD
// variants selected at runtime. Every variant performs the same floating
// point operations in the same order, so results are bit-identical across
// instruction sets (the build disables FMA contraction).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sbs::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Three edge functions e_k(x, y) = (a_k * x + b_k * y) + c_k of one
/// counter-clockwise triangle; a point is covered when all are >= 0.
struct EdgeSet {
  double a[3];
  double b[3];
  double c[3];
};

/// Marks mask[i] = 1 for every pixel centre x = x0 + i * dx (i < n) on row y
/// that lies inside the triangle. Uncovered entries are left untouched.
using CoverRowFn = void (*)(const EdgeSet& edges, double x0, double dx,
                            double y, std::size_t n, std::uint8_t* mask);

/// Acquisition rate for n lanes:
///   out[i] = beta[i] * (area[i] / range[i]^2) * exp(-2.996 * range[i] / R)
/// Lanes with beta <= 0 or range <= 0 produce exactly 0.
using RateBatchFn = void (*)(const double* beta, const double* area,
                             const double* range, double visibility,
                             double* out, std::size_t n);

struct KernelTable {
  Isa isa;
  CoverRowFn cover_row;
  RateBatchFn rate_batch;
};

/// Scalar reference kernels; always available.
const KernelTable& scalar_kernels();

/// Kernels for a specific ISA, or nullptr when not compiled in or not
/// supported by the running CPU.
const KernelTable* kernels_for(Isa isa);

/// Best kernels for this CPU. The SBS_SIMD environment variable
/// ("scalar", "avx2", "neon") overrides the choice when that ISA is usable.
const KernelTable& active();

/// Exponential used by the rate kernels (scalar form). Accurate to a few
/// ulp on [-708, 709]; returns 0 below -708.
double kernel_exp(double x);

// Convenience wrappers over active().
void rate_batch(std::span<const double> beta, std::span<const double> area,
                std::span<const double> range, double visibility,
                std::span<double> out);

}  // namespace sbs::kernels
