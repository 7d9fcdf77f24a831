#include "tfec/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfec/errors.hpp"

namespace tfec {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.first_moment.size() != n || state.second_moment.size() != n) {
    throw ShapeError("adam_step: params (" + std::to_string(n) + "), grads (" + std::to_string(grads.size()) +
                     ") and moments (" + std::to_string(state.first_moment.size()) + ") differ in size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i])) throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i));
  }

  const auto& c = state.config;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

GradCheckReport grad_check(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> params, std::span<const double> analytic, double rel_tol,
                           std::span<const std::size_t> coords, double abs_floor) {
  if (analytic.size() != params.size()) throw ShapeError("grad_check: gradient and params differ in size");
  std::vector<double> w(params.begin(), params.end());
  GradCheckReport report;

  auto check = [&](std::size_t i) {
    const double orig = w[i];
    const double h = 1e-4 * std::max(1.0, std::abs(orig));
    w[i] = orig + h;
    const double fp = f(w);
    w[i] = orig - h;
    const double fm = f(w);
    w[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), abs_floor});
    const double err = std::abs(a - numeric) / denom;
    ++report.checked;
    if (err > report.max_rel_error || report.checked == 1) {
      report.max_rel_error = err;
      report.worst_index = i;
      report.worst_analytic = a;
      report.worst_numeric = numeric;
    }
  };

  if (coords.empty()) {
    for (std::size_t i = 0; i < w.size(); ++i) check(i);
  } else {
    for (auto i : coords) check(i);
  }
  report.passed = report.max_rel_error < rel_tol;
  return report;
}

}  // namespace tfec
