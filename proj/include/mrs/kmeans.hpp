#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mrs/matrix.hpp"
#include "mrs/rng.hpp"

namespace mrs {

struct KmeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignments;  // nearest centroid per input row
  double inertia = 0.0;                  // sum of squared distances
  std::vector<double> inertia_trace;     // one entry per Lloyd iteration
};

namespace detail {

inline double sq_dist(const Matrix& data, std::size_t row,
                      const std::vector<double>& center) {
  double s = 0.0;
  for (std::size_t c = 0; c < data.cols; ++c) {
    const double diff = data.at(row, c) - center[c];
    s += diff * diff;
  }
  return s;
}

inline std::vector<std::vector<double>> kmeanspp_init(const Matrix& data,
                                                      std::size_t k, Rng& rng) {
  const std::size_t n = data.rows;
  std::vector<std::vector<double>> centers;
  centers.reserve(k);

  const auto row_of = [&](std::size_t r) {
    std::vector<double> v(data.cols);
    for (std::size_t c = 0; c < data.cols; ++c) v[c] = data.at(r, c);
    return v;
  };

  centers.push_back(row_of(rng.uniform_index(n)));
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(data, r, c));
      d2[r] = best;
      total += best;
    }
    std::size_t pick;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t r = 0; r < n; ++r) {
        cum += d2[r];
        if (cum >= target) {
          pick = r;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(n);  // all points coincide with a center
    }
    centers.push_back(row_of(pick));
  }
  return centers;
}

inline double assign_all(const Matrix& data,
                         const std::vector<std::vector<double>>& centers,
                         std::vector<std::size_t>& assignments) {
  double inertia = 0.0;
  for (std::size_t r = 0; r < data.rows; ++r) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = sq_dist(data, r, centers[c]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    assignments[r] = best_c;
    inertia += best;
  }
  return inertia;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed;
/// stops when assignments stabilize or after max_iters update rounds. A
/// cluster that loses all points keeps its previous centroid.
inline KmeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                           std::size_t max_iters = 100) {
  const std::size_t n = data.rows;
  if (k == 0 || k > n) {
    throw std::invalid_argument("kmeans: k must be in [1, n]");
  }
  if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");

  Rng rng(seed);
  KmeansResult result;
  result.centroids = detail::kmeanspp_init(data, k, rng);
  result.assignments.assign(n, 0);
  result.inertia = detail::assign_all(data, result.centroids, result.assignments);
  result.inertia_trace.push_back(result.inertia);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<std::vector<double>> next(k, std::vector<double>(data.cols, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t c = result.assignments[r];
      for (std::size_t j = 0; j < data.cols; ++j) next[c][j] += data.at(r, j);
      ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        next[c] = result.centroids[c];
        continue;
      }
      for (double& v : next[c]) v /= static_cast<double>(counts[c]);
    }

    std::vector<std::size_t> next_assign(n, 0);
    const double inertia = detail::assign_all(data, next, next_assign);
    result.centroids = std::move(next);
    result.inertia = inertia;
    result.inertia_trace.push_back(inertia);
    const bool stable = next_assign == result.assignments;
    result.assignments = std::move(next_assign);
    if (stable) break;
  }
  return result;
}

}  // namespace mrs
