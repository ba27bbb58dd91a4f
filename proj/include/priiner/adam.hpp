#pragma once

// Plain Adam with bias-corrected moments over a flat parameter vector.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "priiner/common.hpp"

namespace priiner {

struct AdamState {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<double> m, v;

  explicit AdamState(std::size_t n, double lr = 1e-2)
      : learning_rate(lr), m(n, 0.0), v(n, 0.0) {}
};

inline void adam_step(AdamState& state, std::span<double> params,
                      std::span<const double> grads,
                      const std::string& block_name = "params") {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ValidationError("adam_step: shape mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (!std::isfinite(g))
      throw NumericalError("adam_step: non-finite gradient in block '" +
                           block_name + "' at index " + std::to_string(i));
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace priiner
