#pragma once

#include "sbs/kernels/kernels.hpp"

namespace sbs::kernels {

namespace scalar {
void cover_row(const EdgeSet& e, double x0, double dx, double y, std::size_t n,
               std::uint8_t* mask);
void rate_batch(const double* beta, const double* area, const double* range,
                double visibility, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
const KernelTable& table();
}

namespace neon {
const KernelTable& table();
}

}  // namespace sbs::kernels
