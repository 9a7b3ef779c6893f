#pragma once

#include <complex>
#include <span>

namespace ulab::detail {

enum class FftDirection { forward, backward };

/// out = post * C . DFT(pre * C . in), where DFT is the unnormalized 3-D
/// transform of an n^3 row-major array (forward: exp(-2 pi i k m / n),
/// backward: exp(+2 pi i k m / n)) and C is the checkerboard sign
/// (-1)^(k1+k2+k3) when `checkerboard` is set, 1 otherwise. in and out may
/// alias.
///
/// Plans are deterministic (FFTW_ESTIMATE) unless ULAB_FFTW_WISDOM names a
/// wisdom file, in which case plans are measured once and the wisdom is
/// persisted so later runs reuse the same algorithms.
void fft3d(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int n,
           FftDirection dir, bool checkerboard = false, double pre = 1.0, double post = 1.0);

}  // namespace ulab::detail
