#pragma once

// Central finite-difference gradient oracle. Lives in test code only and is
// independent of the reverse-mode path it checks.

#include <cmath>
#include <functional>
#include <vector>

#include "laac/rng.hpp"
#include "laac/tensor.hpp"

namespace laac::testing {

// d loss / d param[index] via central differences at step h
inline double finite_diff(const std::function<double()>& loss_fn, laac::Tensor& param,
                          std::size_t index, double h = 1e-5) {
  auto& w = param.mutable_values();
  const double saved = w[index];
  w[index] = saved + h;
  const double up = loss_fn();
  w[index] = saved - h;
  const double down = loss_fn();
  w[index] = saved;
  return (up - down) / (2.0 * h);
}

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::size_t checked = 0;
};

// Compares analytic gradients (already accumulated in the params) against the
// oracle on `coords` randomly chosen coordinates. Relative error uses an
// absolute floor so near-zero gradients do not blow up the ratio.
inline GradCheckResult check_gradients(const std::function<double()>& loss_fn,
                                       std::vector<laac::Tensor> params, std::size_t coords,
                                       laac::SeededRng& rng, double h = 1e-5,
                                       double floor = 1e-6) {
  GradCheckResult result;
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (param, index)
  for (std::size_t p = 0; p < params.size(); ++p)
    for (std::size_t i = 0; i < params[p].size(); ++i) slots.emplace_back(p, i);
  for (std::size_t c = 0; c < coords; ++c) {
    const auto& [p, i] = slots[static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(slots.size())))];
    const double analytic = params[p].grad()[i];
    const double numeric = finite_diff(loss_fn, params[p], i, h);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    result.max_rel_err = std::max(result.max_rel_err, std::abs(analytic - numeric) / denom);
    result.checked++;
  }
  return result;
}

}  // namespace laac::testing
