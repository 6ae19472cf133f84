#include "laac/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace laac {

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  if (cfg_.lr <= 0.0) throw std::invalid_argument("AdamOptimizer: lr must be positive");
  states_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    states_[i].m.assign(params_[i].size(), 0.0);
    states_[i].v.assign(params_[i].size(), 0.0);
  }
}

void AdamOptimizer::step() {
  for (auto& p : params_) {
    for (double g : p.grad())
      if (!std::isfinite(g))
        throw std::runtime_error("adam step aborted: non-finite gradient in parameter '" +
                                 p.name() + "'");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    AdamState& st = states_[i];
    st.t += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(st.t));
    const auto& g = params_[i].grad();
    auto& w = params_[i].mutable_values();
    for (std::size_t j = 0; j < w.size(); ++j) {
      st.m[j] = cfg_.beta1 * st.m[j] + (1.0 - cfg_.beta1) * g[j];
      st.v[j] = cfg_.beta2 * st.v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = st.m[j] / bc1;
      const double vhat = st.v[j] / bc2;
      w[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void AdamOptimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace laac
