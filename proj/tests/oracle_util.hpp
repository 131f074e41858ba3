#pragma once

// Independent eigen oracle for PCA checks: brute-force covariance plus power
// iteration with Hotelling deflation. Deliberately a different algorithm from
// the library's Jacobi path.

#include <cmath>
#include <vector>

#include "mrs/matrix.hpp"
#include "mrs/rng.hpp"

namespace oracle {

struct Eigen {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
};

inline mrs::Matrix brute_force_covariance(const mrs::Matrix& data) {
  const std::size_t n = data.rows, d = data.cols;
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += data.at(r, c);
  }
  for (double& m : mean) m /= static_cast<double>(n);
  mrs::Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        s += (data.at(r, i) - mean[i]) * (data.at(r, j) - mean[j]);
      }
      cov.at(i, j) = s / static_cast<double>(n - 1);
    }
  }
  return cov;
}

inline Eigen power_iteration_eigen(mrs::Matrix a, std::size_t k) {
  const std::size_t d = a.rows;
  Eigen out;
  mrs::Rng rng(12345);
  for (std::size_t comp = 0; comp < k; ++comp) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.normal();
    double lambda = 0.0;
    for (std::size_t iter = 0; iter < 200000; ++iter) {
      std::vector<double> av(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) av[i] += a.at(i, j) * v[j];
      }
      double norm = 0.0;
      for (double x : av) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-300) break;
      double diff = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        av[i] /= norm;
        diff += std::abs(av[i] - v[i]);
      }
      v = av;
      lambda = norm;
      if (diff < 1e-13) break;
    }
    out.eigenvalues.push_back(lambda);
    out.eigenvectors.push_back(v);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) a.at(i, j) -= lambda * v[i] * v[j];
    }
  }
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace oracle
