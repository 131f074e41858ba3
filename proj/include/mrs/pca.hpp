#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mrs/matrix.hpp"

namespace mrs {

struct PcaModel {
  std::vector<double> mean;                     // length d
  std::vector<std::vector<double>> components;  // k orthonormal rows, length d
  std::vector<double> eigenvalues;              // k non-negative, descending

  std::size_t dim() const { return mean.size(); }
  std::size_t k() const { return components.size(); }
};

namespace detail {

// Largest-magnitude coordinate made positive, so component signs are stable.
inline void fix_component_sign(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace detail

/// PCA of n samples (rows) in d dimensions: column mean plus the top-k
/// eigenvectors of the sample covariance (divisor n-1). The d x d covariance
/// is eigen-decomposed directly when d is small; for wide data (d > 4n) the
/// n x n Gram matrix is decomposed instead and its eigenvectors mapped back.
inline PcaModel pca_fit(const Matrix& data, std::size_t k) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 samples");
  if (k < 1 || k > std::min(n, d)) {
    throw std::invalid_argument("pca_fit: k out of range [1, min(n, d)]");
  }

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) model.mean[c] += data.at(r, c);
  }
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix centered(n, d);
  double total_sq = 0.0;
  double data_sq = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double x = data.at(r, c) - model.mean[c];
      centered.at(r, c) = x;
      total_sq += x * x;
      data_sq += data.at(r, c) * data.at(r, c);
    }
  }
  if (total_sq <= 1e-24 * std::max(1.0, data_sq)) {
    throw std::invalid_argument("pca_fit: data has zero variance");
  }

  const double divisor = static_cast<double>(n - 1);
  model.components.reserve(k);
  model.eigenvalues.reserve(k);

  if (d <= 4 * n) {
    Matrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += centered.at(r, i) * centered.at(r, j);
        cov.at(i, j) = s / divisor;
        cov.at(j, i) = cov.at(i, j);
      }
    }
    const SymmetricEigen eig = eigen_symmetric(std::move(cov));
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> comp(d);
      for (std::size_t c = 0; c < d; ++c) comp[c] = eig.eigenvectors.at(i, c);
      detail::fix_component_sign(comp);
      model.components.push_back(std::move(comp));
      model.eigenvalues.push_back(std::max(0.0, eig.eigenvalues[i]));
    }
  } else {
    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += centered.at(i, c) * centered.at(j, c);
        gram.at(i, j) = s;
        gram.at(j, i) = s;
      }
    }
    const SymmetricEigen eig = eigen_symmetric(std::move(gram));
    for (std::size_t i = 0; i < k; ++i) {
      const double s = eig.eigenvalues[i];
      if (s <= 1e-12 * std::max(eig.eigenvalues[0], 1e-300)) {
        throw std::invalid_argument(
            "pca_fit: requested component " + std::to_string(i + 1) +
            " exceeds the data rank");
      }
      std::vector<double> comp(d, 0.0);
      const double inv_norm = 1.0 / std::sqrt(s);
      for (std::size_t r = 0; r < n; ++r) {
        const double u = eig.eigenvectors.at(i, r);
        if (u == 0.0) continue;
        for (std::size_t c = 0; c < d; ++c) comp[c] += u * centered.at(r, c);
      }
      for (double& x : comp) x *= inv_norm;
      detail::fix_component_sign(comp);
      model.components.push_back(std::move(comp));
      model.eigenvalues.push_back(s / divisor);
    }
  }
  return model;
}

/// Coordinates of (x - mean) along each component.
inline std::vector<double> pca_project(const PcaModel& model,
                                       const std::vector<double>& x) {
  if (x.size() != model.dim()) {
    throw std::invalid_argument("pca_project: dimension mismatch");
  }
  std::vector<double> coeffs(model.k(), 0.0);
  for (std::size_t i = 0; i < model.k(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < model.dim(); ++c) {
      s += (x[c] - model.mean[c]) * model.components[i][c];
    }
    coeffs[i] = s;
  }
  return coeffs;
}

/// mean + sum_i coeffs[i] * component_i.
inline std::vector<double> pca_reconstruct(const PcaModel& model,
                                           const std::vector<double>& coeffs) {
  if (coeffs.size() != model.k()) {
    throw std::invalid_argument("pca_reconstruct: coefficient count mismatch");
  }
  std::vector<double> x = model.mean;
  for (std::size_t i = 0; i < model.k(); ++i) {
    for (std::size_t c = 0; c < model.dim(); ++c) {
      x[c] += coeffs[i] * model.components[i][c];
    }
  }
  return x;
}

}  // namespace mrs
