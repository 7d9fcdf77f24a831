#include "tfec/layers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tfec::layers {

namespace {

constexpr double kNormFloor = 1e-12;

// Range of kernel taps k for which t + k - pad lands inside [0, length).
inline void tap_range(std::size_t t, std::size_t length, std::size_t kernel, std::size_t pad, std::size_t& k0,
                      std::size_t& k1) {
  k0 = t < pad ? pad - t : 0;
  k1 = std::min(kernel, length + pad - t);
}

}  // namespace

void conv1d_forward(std::span<const double> x, std::size_t length, const Conv1dShape& s,
                    std::span<const double> w, std::span<const double> b, std::span<double> out) {
  const std::size_t cin = s.in_channels;
  const std::size_t cout = s.out_channels;
  const std::size_t pad = (s.kernel - 1) / 2;
  for (std::size_t t = 0; t < length; ++t) {
    double* o = out.data() + t * cout;
    std::copy(b.begin(), b.end(), o);
    std::size_t k0, k1;
    tap_range(t, length, s.kernel, pad, k0, k1);
    for (std::size_t k = k0; k < k1; ++k) {
      const double* xr = x.data() + (t + k - pad) * cin;
      const double* wk = w.data() + k * cin * cout;
      for (std::size_t i = 0; i < cin; ++i) {
        const double xv = xr[i];
        const double* wr = wk + i * cout;
        for (std::size_t c = 0; c < cout; ++c) o[c] += wr[c] * xv;
      }
    }
  }
}

void conv1d_backward(std::span<const double> x, std::size_t length, const Conv1dShape& s,
                     std::span<const double> w, std::span<const double> grad_out, std::span<double> grad_w,
                     std::span<double> grad_b, std::span<double> grad_x) {
  const std::size_t cin = s.in_channels;
  const std::size_t cout = s.out_channels;
  const std::size_t pad = (s.kernel - 1) / 2;

  if (!grad_b.empty()) {
    for (std::size_t t = 0; t < length; ++t) {
      const double* g = grad_out.data() + t * cout;
      for (std::size_t c = 0; c < cout; ++c) grad_b[c] += g[c];
    }
  }

  if (!grad_w.empty()) {
    for (std::size_t t = 0; t < length; ++t) {
      const double* g = grad_out.data() + t * cout;
      std::size_t k0, k1;
      tap_range(t, length, s.kernel, pad, k0, k1);
      for (std::size_t k = k0; k < k1; ++k) {
        const double* xr = x.data() + (t + k - pad) * cin;
        double* gwk = grad_w.data() + k * cin * cout;
        for (std::size_t i = 0; i < cin; ++i) {
          const double xv = xr[i];
          double* gw = gwk + i * cout;
          for (std::size_t c = 0; c < cout; ++c) gw[c] += g[c] * xv;
        }
      }
    }
  }

  if (!grad_x.empty()) {
    // transposed copy [k][out][in] so the inner loop is an axpy over inputs
    std::vector<double> wt(w.size());
    for (std::size_t k = 0; k < s.kernel; ++k) {
      for (std::size_t i = 0; i < cin; ++i) {
        for (std::size_t c = 0; c < cout; ++c) wt[(k * cout + c) * cin + i] = w[(k * cin + i) * cout + c];
      }
    }
    for (std::size_t t = 0; t < length; ++t) {
      const double* g = grad_out.data() + t * cout;
      std::size_t k0, k1;
      tap_range(t, length, s.kernel, pad, k0, k1);
      for (std::size_t k = k0; k < k1; ++k) {
        double* gx = grad_x.data() + (t + k - pad) * cin;
        const double* wk = wt.data() + k * cout * cin;
        for (std::size_t c = 0; c < cout; ++c) {
          const double gv = g[c];
          const double* wr = wk + c * cin;
          for (std::size_t i = 0; i < cin; ++i) gx[i] += wr[i] * gv;
        }
      }
    }
  }
}

void dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> b,
                   std::span<double> out) {
  const std::size_t in = x.size();
  for (std::size_t o = 0; o < out.size(); ++o) {
    double acc = b[o];
    const double* wr = w.data() + o * in;
    for (std::size_t i = 0; i < in; ++i) acc += wr[i] * x[i];
    out[o] = acc;
  }
}

void dense_backward(std::span<const double> x, std::span<const double> w, std::span<const double> grad_out,
                    std::span<double> grad_w, std::span<double> grad_b, std::span<double> grad_x) {
  const std::size_t in = x.size();
  for (std::size_t o = 0; o < grad_out.size(); ++o) {
    const double g = grad_out[o];
    if (!grad_b.empty()) grad_b[o] += g;
    if (!grad_w.empty()) {
      double* gw = grad_w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) gw[i] += g * x[i];
    }
    if (!grad_x.empty()) {
      const double* wr = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) grad_x[i] += g * wr[i];
    }
  }
}

void relu_inplace(std::span<double> x) {
  for (auto& v : x) v = v > 0.0 ? v : 0.0;
}

void relu_backward(std::span<const double> activated, std::span<double> grad) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(activated[i] > 0.0)) grad[i] = 0.0;
  }
}

void mean_pool_forward(std::span<const double> x, std::size_t length, std::size_t channels, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t c = 0; c < channels; ++c) out[c] += x[t * channels + c];
  }
  const double inv = 1.0 / static_cast<double>(length);
  for (auto& v : out) v *= inv;
}

void mean_pool_backward(std::size_t length, std::size_t channels, std::span<const double> grad_out,
                        std::span<double> grad_x) {
  const double inv = 1.0 / static_cast<double>(length);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t c = 0; c < channels; ++c) grad_x[t * channels + c] += grad_out[c] * inv;
  }
}

double l2_normalize_forward(std::span<const double> z, std::span<double> r) {
  double sq = 0.0;
  for (double v : z) sq += v * v;
  const double norm = std::sqrt(sq);
  const double denom = std::max(norm, kNormFloor);
  for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i] / denom;
  return norm;
}

void l2_normalize_backward(std::span<const double> r, double norm, std::span<const double> grad_r,
                           std::span<double> grad_z) {
  if (norm < kNormFloor) {
    for (std::size_t i = 0; i < r.size(); ++i) grad_z[i] += grad_r[i] / kNormFloor;
    return;
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) dot += r[i] * grad_r[i];
  for (std::size_t i = 0; i < r.size(); ++i) grad_z[i] += (grad_r[i] - r[i] * dot) / norm;
}

}  // namespace tfec::layers
