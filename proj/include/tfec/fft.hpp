#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tfec {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// Precomputed transform of one length. Powers of two use an iterative
/// radix-2 Cooley-Tukey; every other length goes through Bluestein's chirp-z
/// reformulation on a power-of-two buffer of size >= 2n-1.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  /// In-place unnormalized transform, sign -1 (forward) or +1 (inverse).
  void transform(std::span<Complex> data, bool inverse) const;

 private:
  void radix2(std::span<Complex> data, bool inverse) const;
  void bluestein(std::span<Complex> data, bool inverse) const;

  std::size_t n_;
  bool pow2_;
  std::vector<Complex> twiddles_;   // exp(-2*pi*i*k/m) for k < m/2, m = radix-2 length
  std::vector<std::size_t> bitrev_;
  // Bluestein state (unused for powers of two)
  std::unique_ptr<FftPlan> inner_;
  std::vector<Complex> chirp_;          // exp(-i*pi*k^2/n), k < n
  std::vector<Complex> kernel_fwd_;     // transform of conj chirp, padded
  std::vector<Complex> kernel_inv_;     // transform of chirp, padded
};

/// Shared plan for length n (cached per thread).
const FftPlan& fft_plan(std::size_t n);

/// bin[k] = sum_t x[t] exp(-2 pi i k t / T). Throws NumericError on
/// non-finite input and ConfigError on empty input.
Spectrum dft_forward(std::span<const double> signal);

struct InverseResult {
  std::vector<double> signal;
  /// max |Im| over the synthesized samples, before it was discarded.
  double imag_residual = 0.0;
};

/// x[t] = (1/T) sum_k bin[k] exp(+2 pi i k t / T), real part kept.
InverseResult dft_inverse(std::span<const Complex> spectrum);

/// Complex-to-complex transforms, mostly for tests and Hermitian diagnostics.
Spectrum fft(std::span<const Complex> data);
Spectrum ifft(std::span<const Complex> data);  // includes the 1/T factor

}  // namespace tfec
