#pragma once

#include <complex>
#include <span>

namespace mpwm::detail {

// Thin FFTW wrapper. Plans are cached per size; execution is thread-safe.

/// out[k] = sum_m in[m] e^{-j 2 pi k m / N}, k = 0..N/2. N must be a power of two.
void real_forward(std::span<const double> in, std::span<std::complex<double>> out);

/// out[m] = sum_k C_k e^{+j 2 pi k m / N} over the Hermitian extension of
/// in[0..N/2]. Unnormalized.
void real_inverse(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace mpwm::detail
