#pragma once

// Forward and backward passes of the few layers the model uses. Activations
// are time-major (t * channels + c). Backward functions accumulate (+=) into
// their gradient outputs; pass an empty span to skip a gradient.

#include <cstddef>
#include <span>

namespace tfec::layers {

struct Conv1dShape {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;  // odd; "same" padding of (kernel - 1) / 2 on each side
};

/// Weights are laid out [k][in][out]; out is length x out_channels.
void conv1d_forward(std::span<const double> x, std::size_t length, const Conv1dShape& s,
                    std::span<const double> w, std::span<const double> b, std::span<double> out);

void conv1d_backward(std::span<const double> x, std::size_t length, const Conv1dShape& s,
                     std::span<const double> w, std::span<const double> grad_out, std::span<double> grad_w,
                     std::span<double> grad_b, std::span<double> grad_x);

/// out[o] = b[o] + sum_i w[o * in + i] x[i]
void dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> b,
                   std::span<double> out);

void dense_backward(std::span<const double> x, std::span<const double> w, std::span<const double> grad_out,
                    std::span<double> grad_w, std::span<double> grad_b, std::span<double> grad_x);

void relu_inplace(std::span<double> x);

/// Zeroes grad where the post-activation output is not positive.
void relu_backward(std::span<const double> activated, std::span<double> grad);

/// Mean over time of a length x channels activation.
void mean_pool_forward(std::span<const double> x, std::size_t length, std::size_t channels, std::span<double> out);

void mean_pool_backward(std::size_t length, std::size_t channels, std::span<const double> grad_out,
                        std::span<double> grad_x);

/// r = z / max(|z|, 1e-12). Returns the norm used.
double l2_normalize_forward(std::span<const double> z, std::span<double> r);

/// grad_z += (grad_r - r (r . grad_r)) / norm
void l2_normalize_backward(std::span<const double> r, double norm, std::span<const double> grad_r,
                           std::span<double> grad_z);

}  // namespace tfec::layers
