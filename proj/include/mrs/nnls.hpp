#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mrs/matrix.hpp"

namespace mrs {

namespace detail {

// Gaussian elimination with partial pivoting; a is overwritten.
inline std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
    }
    if (std::abs(a.at(pivot, col)) < 1e-300) {
      throw std::runtime_error("solve: singular system");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a.at(col, c), a.at(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a.at(r, col) / a.at(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a.at(r, c) * x[c];
    x[r] = s / a.at(r, r);
  }
  return x;
}

}  // namespace detail

/// Lawson-Hanson active-set solve of min ||Ax - b|| s.t. x >= 0, given the
/// normal-equation pair AtA = A'A and Atb = A'b.
inline std::vector<double> nnls_normal(const Matrix& ata,
                                       const std::vector<double>& atb) {
  const std::size_t n = ata.rows;
  if (ata.cols != n || atb.size() != n) {
    throw std::invalid_argument("nnls: normal equation shape mismatch");
  }

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(ata.at(i, i)));
  const double tol = 1e-12 * std::max(scale, 1e-300);

  std::vector<double> x(n, 0.0);
  std::vector<bool> passive(n, false);
  std::vector<double> w(atb);  // gradient A'(b - Ax), x = 0 initially

  const auto refresh_gradient = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      double s = atb[i];
      for (std::size_t j = 0; j < n; ++j) s -= ata.at(i, j) * x[j];
      w[i] = s;
    }
  };

  const auto solve_passive = [&](std::vector<std::size_t>& idx) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (passive[i]) idx.push_back(i);
    }
    Matrix sub(idx.size(), idx.size());
    std::vector<double> rhs(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      rhs[r] = atb[idx[r]];
      for (std::size_t c = 0; c < idx.size(); ++c) {
        sub.at(r, c) = ata.at(idx[r], idx[c]);
      }
    }
    return detail::solve_dense(std::move(sub), std::move(rhs));
  };

  std::vector<std::size_t> idx;
  for (std::size_t outer = 0; outer < 3 * n + 10; ++outer) {
    std::size_t best = n;
    double best_w = tol;
    for (std::size_t i = 0; i < n; ++i) {
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    }
    if (best == n) break;  // KKT satisfied
    passive[best] = true;

    for (std::size_t inner = 0; inner < 3 * n + 10; ++inner) {
      const std::vector<double> z = solve_passive(idx);
      bool feasible = true;
      for (double zi : z) {
        if (zi <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        for (std::size_t r = 0; r < idx.size(); ++r) x[idx[r]] = z[r];
        break;
      }
      double alpha = 1.0;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (z[r] <= 0.0) {
          const double xi = x[idx[r]];
          alpha = std::min(alpha, xi / (xi - z[r]));
        }
      }
      for (std::size_t r = 0; r < idx.size(); ++r) {
        x[idx[r]] += alpha * (z[r] - x[idx[r]]);
      }
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (x[idx[r]] <= tol * 1e-3) {
          x[idx[r]] = 0.0;
          passive[idx[r]] = false;
        }
      }
    }
    refresh_gradient();
  }
  return x;
}

/// min ||Ax - b|| subject to x >= 0.
inline std::vector<double> nnls(const Matrix& a, const std::vector<double>& b) {
  if (a.rows != b.size()) throw std::invalid_argument("nnls: shape mismatch");
  Matrix ata(a.cols, a.cols);
  std::vector<double> atb(a.cols, 0.0);
  for (std::size_t i = 0; i < a.cols; ++i) {
    for (std::size_t j = i; j < a.cols; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < a.rows; ++r) s += a.at(r, i) * a.at(r, j);
      ata.at(i, j) = s;
      ata.at(j, i) = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) s += a.at(r, i) * b[r];
    atb[i] = s;
  }
  return nnls_normal(ata, atb);
}

}  // namespace mrs
