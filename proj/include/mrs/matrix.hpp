#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mrs/spectrum.hpp"

namespace mrs {

/// Dense row-major matrix of finite reals.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows_in) {
    if (rows_in.empty()) throw std::invalid_argument("matrix: no rows");
    Matrix m(rows_in.size(), rows_in.front().size());
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (rows_in[r].size() != m.cols) {
        throw std::invalid_argument("matrix: ragged rows");
      }
      for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[r][c];
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

inline Matrix dataset_matrix(const LabeledDataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("matrix: empty dataset");
  Matrix m(dataset.size(), dataset.dim());
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = dataset.spectra[r][c];
  }
  return m;
}

struct SymmetricEigen {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // row i pairs with eigenvalues[i], unit norm
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenvalues are
/// returned in descending order with matching unit eigenvectors.
inline SymmetricEigen eigen_symmetric(Matrix a, std::size_t max_sweeps = 64) {
  if (a.rows != a.cols) throw std::invalid_argument("eigen: matrix not square");
  const std::size_t n = a.rows;
  Matrix v = Matrix::identity(n);

  double frob2 = 0.0;
  for (double x : a.data) frob2 += x * x;
  const double off_tol = 1e-28 * std::max(frob2, 1e-300);

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off2 += 2.0 * a.at(p, q) * a.at(p, q);
    }
    if (off2 <= off_tol) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double alpha = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (alpha >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(alpha) + std::sqrt(1.0 + alpha * alpha));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const double app = a.at(p, p);
        const double aqq = a.at(q, q);
        a.at(p, p) = app - t * apq;
        a.at(q, q) = aqq + t * apq;
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a.at(i, p);
          const double aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(p, i) = a.at(i, p);
          a.at(i, q) = s * aip + c * aiq;
          a.at(q, i) = a.at(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v.at(i, p);
          const double viq = v.at(i, q);
          v.at(i, p) = c * vip - s * viq;
          v.at(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a.at(i, i) > a.at(j, j);
  });

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.eigenvalues[r] = a.at(order[r], order[r]);
    for (std::size_t i = 0; i < n; ++i) {
      out.eigenvectors.at(r, i) = v.at(i, order[r]);
    }
  }
  return out;
}

}  // namespace mrs
