#include "tfec/fft.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "tfec/errors.hpp"

namespace tfec {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

Complex unit_root(std::size_t k, std::size_t m) {
  // exp(-2 pi i k / m), with k reduced so the angle stays small
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % m) / static_cast<double>(m);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
  if (n == 0) throw ConfigError("transform length must be positive");
  if (pow2_) {
    twiddles_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) twiddles_[k] = unit_root(k, n);
    bitrev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
    return;
  }

  const std::size_t m = next_pow2(2 * n - 1);
  inner_ = std::make_unique<FftPlan>(m);
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the argument of exp(-i pi k^2 / n) bounded
    const std::size_t k2 = (k * k) % (2 * n);
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp_[k] = {std::cos(angle), std::sin(angle)};
  }
  kernel_fwd_.assign(m, Complex{});
  kernel_inv_.assign(m, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    kernel_fwd_[k] = std::conj(chirp_[k]);
    kernel_inv_[k] = chirp_[k];
    if (k > 0) {
      kernel_fwd_[m - k] = std::conj(chirp_[k]);
      kernel_inv_[m - k] = chirp_[k];
    }
  }
  inner_->transform(kernel_fwd_, false);
  inner_->transform(kernel_inv_, false);
}

void FftPlan::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != n_) throw ShapeError("transform length mismatch");
  if (n_ == 1) return;
  if (pow2_) {
    radix2(data, inverse);
  } else {
    bluestein(data, inverse);
  }
}

void FftPlan::radix2(std::span<Complex> data, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        Complex w = twiddles_[j * stride];
        if (inverse) w = std::conj(w);
        const Complex u = data[start + j];
        const Complex v = data[start + j + half] * w;
        data[start + j] = u + v;
        data[start + j + half] = u - v;
      }
    }
  }
}

void FftPlan::bluestein(std::span<Complex> data, bool inverse) const {
  // X[k] = w_k * sum_t (x[t] w_t) conj(w_{k-t}),  w_k = exp(-i pi k^2 / n)
  // The inverse uses conj(w) throughout.
  const std::size_t n = n_;
  const std::size_t m = inner_->size();
  std::vector<Complex> buf(m, Complex{});
  for (std::size_t t = 0; t < n; ++t) buf[t] = data[t] * (inverse ? std::conj(chirp_[t]) : chirp_[t]);
  inner_->transform(buf, false);
  const auto& kernel = inverse ? kernel_inv_ : kernel_fwd_;
  for (std::size_t k = 0; k < m; ++k) buf[k] *= kernel[k];
  inner_->transform(buf, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) {
    data[k] = buf[k] * scale * (inverse ? std::conj(chirp_[k]) : chirp_[k]);
  }
}

const FftPlan& fft_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

Spectrum dft_forward(std::span<const double> signal) {
  if (signal.empty()) throw ConfigError("dft_forward: empty signal");
  Spectrum out(signal.size());
  for (std::size_t t = 0; t < signal.size(); ++t) {
    if (!std::isfinite(signal[t])) {
      throw NumericError("dft_forward: non-finite input at index " + std::to_string(t));
    }
    out[t] = Complex(signal[t], 0.0);
  }
  fft_plan(out.size()).transform(out, false);
  return out;
}

InverseResult dft_inverse(std::span<const Complex> spectrum) {
  if (spectrum.empty()) throw ConfigError("dft_inverse: empty spectrum");
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (!std::isfinite(spectrum[k].real()) || !std::isfinite(spectrum[k].imag())) {
      throw NumericError("dft_inverse: non-finite bin " + std::to_string(k));
    }
  }
  auto full = ifft(spectrum);
  InverseResult r;
  r.signal.resize(full.size());
  for (std::size_t t = 0; t < full.size(); ++t) {
    r.signal[t] = full[t].real();
    r.imag_residual = std::max(r.imag_residual, std::abs(full[t].imag()));
  }
  return r;
}

Spectrum fft(std::span<const Complex> data) {
  Spectrum out(data.begin(), data.end());
  fft_plan(out.size()).transform(out, false);
  return out;
}

Spectrum ifft(std::span<const Complex> data) {
  Spectrum out(data.begin(), data.end());
  fft_plan(out.size()).transform(out, true);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace tfec
