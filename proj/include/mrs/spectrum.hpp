#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mrs {

/// Tissue grade. Order Healthy < Low < High is load-bearing: it fixes
/// iteration order, vote tie-breaks, and file layouts.
enum class Grade : int { Healthy = 0, Low = 1, High = 2 };

inline constexpr std::size_t kGradeCount = 3;
inline constexpr std::array<Grade, kGradeCount> kAllGrades{
    Grade::Healthy, Grade::Low, Grade::High};

inline std::size_t grade_index(Grade g) { return static_cast<std::size_t>(g); }

inline std::string_view grade_name(Grade g) {
  switch (g) {
    case Grade::Healthy: return "healthy";
    case Grade::Low: return "low";
    case Grade::High: return "high";
  }
  throw std::invalid_argument("invalid grade value");
}

inline Grade parse_grade(std::string_view token) {
  if (token == "healthy") return Grade::Healthy;
  if (token == "low") return Grade::Low;
  if (token == "high") return Grade::High;
  throw std::invalid_argument("unknown grade token '" + std::string(token) + "'");
}

/// Fixed-length real-valued signal.
struct Spectrum {
  std::vector<double> values;

  Spectrum() = default;
  explicit Spectrum(std::vector<double> v) : values(std::move(v)) {
    for (double x : values) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("spectrum contains a non-finite value");
      }
    }
  }

  std::size_t dim() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const Spectrum& other) const { return values == other.values; }
};

/// Spectra with grade labels. All spectra share one dimension.
struct LabeledDataset {
  std::vector<Spectrum> spectra;
  std::vector<Grade> labels;
  std::string source = "real";  // provenance tag, e.g. "real", "pmm", "gan"

  std::size_t size() const { return spectra.size(); }
  bool empty() const { return spectra.empty(); }
  std::size_t dim() const { return spectra.empty() ? 0 : spectra.front().dim(); }

  void push_back(Spectrum s, Grade g) {
    if (!spectra.empty() && s.dim() != dim()) {
      throw std::invalid_argument("spectrum dimension mismatch: expected " +
                                  std::to_string(dim()) + ", got " +
                                  std::to_string(s.dim()));
    }
    spectra.push_back(std::move(s));
    labels.push_back(g);
  }

  std::size_t count(Grade g) const {
    std::size_t n = 0;
    for (Grade l : labels) n += (l == g);
    return n;
  }

  LabeledDataset grade_subset(Grade g) const {
    LabeledDataset out;
    out.source = source;
    for (std::size_t i = 0; i < size(); ++i) {
      if (labels[i] == g) out.push_back(spectra[i], labels[i]);
    }
    return out;
  }

  bool operator==(const LabeledDataset& other) const {
    return spectra == other.spectra && labels == other.labels;
  }
};

}  // namespace mrs
