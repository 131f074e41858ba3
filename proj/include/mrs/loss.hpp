#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrs/tensor.hpp"

namespace mrs {

struct BceResult {
  double loss;
  Tensor grad;  // d(loss)/d(pred), same shape as pred
};

/// Mean binary cross-entropy over all elements. Predictions are clamped to
/// [1e-7, 1 - 1e-7] before the logarithm; the gradient is exactly that of the
/// clamped function (zero where the clamp is active).
inline BceResult bce_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape != target.shape) {
    throw std::invalid_argument("bce_loss: shape mismatch");
  }
  if (pred.size() == 0) throw std::invalid_argument("bce_loss: empty input");
  constexpr double kClamp = 1e-7;
  const double n = static_cast<double>(pred.size());

  double loss = 0.0;
  Tensor grad(pred.shape);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double t = target.data[i];
    if (t != 0.0 && t != 1.0) {
      throw std::invalid_argument("bce_loss: targets must be 0 or 1");
    }
    const double raw = pred.data[i];
    const double p = std::clamp(raw, kClamp, 1.0 - kClamp);
    loss -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    if (raw < kClamp || raw > 1.0 - kClamp) {
      grad.data[i] = 0.0;  // constant region of the clamp
    } else {
      grad.data[i] = (p - t) / (p * (1.0 - p) * n);
    }
  }
  return BceResult{loss / n, std::move(grad)};
}

}  // namespace mrs
