#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mrs/layers.hpp"

namespace mrs {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment buffers per parameter plus the shared step counter.
/// Buffers are sized on the first step and must match thereafter.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> m, v;
  std::uint64_t t = 0;
};

/// One bias-corrected Adam update over the given parameters, in place.
inline void adam_step(const std::vector<ParamRef>& params, AdamState& state) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i].value->size(), 0.0);
      state.v[i].assign(params[i].value->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: parameter count changed");
  }

  state.t += 1;
  const double b1 = state.config.beta1;
  const double b2 = state.config.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.t));

  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& value = *params[i].value;
    const std::vector<double>& grad = *params[i].grad;
    std::vector<double>& m = state.m[i];
    std::vector<double>& v = state.v[i];
    if (value.size() != m.size() || grad.size() != m.size()) {
      throw std::invalid_argument("adam_step: buffer shape mismatch");
    }
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double m_hat = m[j] / bias1;
      const double v_hat = v[j] / bias2;
      value[j] -= state.config.lr * m_hat / (std::sqrt(v_hat) + state.config.eps);
    }
  }
}

}  // namespace mrs
