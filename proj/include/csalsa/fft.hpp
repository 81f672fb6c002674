#pragma once

#include <span>

#include "csalsa/types.hpp"

namespace csalsa::fft {

/// Unitary 2D DFT U (1/sqrt(n) scaling), so U^H U = I holds exactly.
/// Input and output are row-major grids of the given shape.
CVec forward(std::span<const cplx> x, Shape shape);

/// Inverse unitary 2D DFT U^H.
CVec inverse(std::span<const cplx> X, Shape shape);

/// Unnormalized forward DFT (sum_x e^{-2 pi i ...} x), used to turn a
/// spatial kernel into the diagonal of B = U^H D U.
CVec forward_unnormalized(std::span<const cplx> x, Shape shape);

namespace testing {
/// Fault-injection hook: multiplies the forward transform's normalization
/// by `factor`. 1.0 restores correct behaviour. Process-wide.
void set_normalization_fault(double factor);
double normalization_fault();
}  // namespace testing

}  // namespace csalsa::fft
