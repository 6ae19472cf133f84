#pragma once

#include <cstdint>
#include <vector>

#include "laac/tensor.hpp"

namespace laac {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter moment estimates. t counts completed steps for this parameter.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

// Bias-corrected Adam over a fixed set of named parameters. step() validates
// every gradient before touching any parameter; a non-finite gradient aborts
// the whole step and names the offending parameter.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Tensor> params, AdamConfig cfg);

  void step();
  void zero_grad();

  const AdamState& state(std::size_t i) const { return states_[i]; }
  const std::vector<Tensor>& params() const { return params_; }
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  std::vector<Tensor> params_;
  std::vector<AdamState> states_;
  AdamConfig cfg_;
};

}  // namespace laac
