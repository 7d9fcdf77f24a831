#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tfec {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg) : config(cfg), first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// One bias-corrected Adam update, in place. Throws ShapeError when the
/// sizes of params, grads and moments disagree, NumericError on non-finite
/// gradients (params and state are left untouched in both cases).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool passed = true;
};

/// Compares an analytic gradient with central finite differences using
/// h = 1e-4 * max(1, |w|) per coordinate. The error at a coordinate is
/// |a - n| / max(|a|, |n|, abs_floor). If `coords` is empty every
/// coordinate is checked.
GradCheckReport grad_check(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> params, std::span<const double> analytic, double rel_tol,
                           std::span<const std::size_t> coords = {}, double abs_floor = 1e-7);

}  // namespace tfec
