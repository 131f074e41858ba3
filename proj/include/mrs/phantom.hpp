#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mrs/rng.hpp"
#include "mrs/spectrum.hpp"

namespace mrs {

/// One Lorentzian line: peak value `amplitude` at `center`, half-width `width`
/// (both in sample-index units).
struct Peak {
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
};

/// Synthetic ground-truth generator configuration. Default counts follow the
/// 70/20/30 train and 9/3/5 test composition used throughout the experiments.
struct PhantomConfig {
  std::size_t dim = 1024;
  std::array<std::vector<Peak>, kGradeCount> peaks;
  double amplitude_jitter = 0.15;  // multiplicative, in [0, 1)
  double noise_std = 0.01;         // additive Gaussian
  std::array<std::size_t, kGradeCount> train_counts{70, 20, 30};
  std::array<std::size_t, kGradeCount> test_counts{9, 3, 5};
  std::uint64_t seed = 42;

  void validate() const {
    if (dim == 0) throw std::invalid_argument("phantom: dim must be positive");
    for (const auto& grade_peaks : peaks) {
      for (const Peak& p : grade_peaks) {
        if (p.center < 0.0 || p.center >= static_cast<double>(dim)) {
          throw std::invalid_argument("phantom: peak center out of [0, dim)");
        }
        if (!(p.width > 0.0)) {
          throw std::invalid_argument("phantom: peak width must be positive");
        }
      }
    }
    if (amplitude_jitter < 0.0 || amplitude_jitter >= 1.0) {
      throw std::invalid_argument("phantom: amplitude jitter must be in [0, 1)");
    }
    if (noise_std < 0.0) {
      throw std::invalid_argument("phantom: noise std must be non-negative");
    }
    for (std::size_t g = 0; g < kGradeCount; ++g) {
      if (train_counts[g] == 0 || test_counts[g] == 0) {
        throw std::invalid_argument("phantom: per-grade counts must be positive");
      }
    }
  }
};

/// Grade-distinct 3-peak templates. The grades share peak locations but
/// differ in amplitude ratios, so they stay separable the way real spectra
/// separate by metabolite ratios.
inline PhantomConfig default_phantom_config(std::size_t dim = 1024) {
  PhantomConfig config;
  config.dim = dim;
  const double d = static_cast<double>(dim);
  const double w = std::max(1.0, 0.015 * d);
  config.peaks[grade_index(Grade::Healthy)] = {
      {0.20 * d, w, 1.00}, {0.45 * d, w, 0.55}, {0.75 * d, w, 0.30}};
  config.peaks[grade_index(Grade::Low)] = {
      {0.20 * d, w, 0.60}, {0.45 * d, w, 0.95}, {0.75 * d, w, 0.45}};
  config.peaks[grade_index(Grade::High)] = {
      {0.20 * d, w, 0.35}, {0.45 * d, w, 0.50}, {0.75 * d, w, 1.10}};
  return config;
}

/// Noise-free sum of the grade's peak templates.
inline Spectrum phantom_template(const PhantomConfig& config, Grade grade) {
  std::vector<double> values(config.dim, 0.0);
  for (const Peak& p : config.peaks[grade_index(grade)]) {
    for (std::size_t t = 0; t < config.dim; ++t) {
      const double dt = static_cast<double>(t) - p.center;
      values[t] += p.amplitude * p.width * p.width / (dt * dt + p.width * p.width);
    }
  }
  return Spectrum(std::move(values));
}

namespace detail {

inline Spectrum draw_phantom_spectrum(const PhantomConfig& config, Grade grade,
                                      Rng& rng) {
  std::vector<double> values(config.dim, 0.0);
  for (const Peak& p : config.peaks[grade_index(grade)]) {
    const double amp =
        p.amplitude * (1.0 + config.amplitude_jitter * rng.uniform(-1.0, 1.0));
    for (std::size_t t = 0; t < config.dim; ++t) {
      const double dt = static_cast<double>(t) - p.center;
      values[t] += amp * p.width * p.width / (dt * dt + p.width * p.width);
    }
  }
  if (config.noise_std > 0.0) {
    for (double& v : values) v += rng.normal(0.0, config.noise_std);
  }
  return Spectrum(std::move(values));
}

}  // namespace detail

/// Deterministic (train, test) pair for the given config. Rows are grouped by
/// grade in Healthy < Low < High order within each split.
inline std::pair<LabeledDataset, LabeledDataset> generate_phantom(
    const PhantomConfig& config) {
  config.validate();
  Rng rng(config.seed);
  LabeledDataset train, test;
  train.source = "real";
  test.source = "real";
  for (Grade g : kAllGrades) {
    for (std::size_t i = 0; i < config.train_counts[grade_index(g)]; ++i) {
      train.push_back(detail::draw_phantom_spectrum(config, g, rng), g);
    }
  }
  for (Grade g : kAllGrades) {
    for (std::size_t i = 0; i < config.test_counts[grade_index(g)]; ++i) {
      test.push_back(detail::draw_phantom_spectrum(config, g, rng), g);
    }
  }
  return {std::move(train), std::move(test)};
}

}  // namespace mrs
