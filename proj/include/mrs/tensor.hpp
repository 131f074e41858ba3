#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrs {

/// Dense row-major tensor with explicit shape; the batch dimension is first.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0)
      : shape(std::move(s)), data(count(shape), fill) {}

  Tensor(std::vector<std::size_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != count(shape)) {
      throw std::invalid_argument("tensor: shape does not match data size");
    }
  }

  static std::size_t count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t v : s) n *= v;
    return s.empty() ? 0 : n;
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t batch() const { return shape.empty() ? 0 : shape[0]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  Tensor reshaped(std::vector<std::size_t> new_shape) const {
    if (count(new_shape) != size()) {
      throw std::invalid_argument("tensor: reshape changes element count");
    }
    return Tensor(std::move(new_shape), data);
  }

  std::string shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i > 0) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

}  // namespace mrs
