#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrs/dataset_io.hpp"
#include "mrs/nnls.hpp"
#include "mrs/pca.hpp"
#include "mrs/rng.hpp"
#include "mrs/spectrum.hpp"

namespace mrs {

/// Per-grade tissue model: mean signal plus the PCA eigenvectors and
/// eigenvalues that encode the variation around it.
struct TissueModel {
  Grade grade = Grade::Healthy;
  std::vector<double> mean;
  std::vector<std::vector<double>> eigenvectors;  // K orthonormal rows
  std::vector<double> eigenvalues;                // K non-negative

  std::size_t dim() const { return mean.size(); }
  std::size_t num_eigenvectors() const { return eigenvectors.size(); }
};

/// Non-negative mixing weights for the healthy/low/high tissue models.
/// Not normalized: the sum is unconstrained.
struct MixtureWeights {
  double healthy = 0.0;
  double low = 0.0;
  double high = 0.0;

  double for_grade(Grade g) const {
    switch (g) {
      case Grade::Healthy: return healthy;
      case Grade::Low: return low;
      case Grade::High: return high;
    }
    throw std::invalid_argument("invalid grade value");
  }
};

/// Sample values for each eigenvector coefficient; the generator enumerates
/// the Cartesian product of the per-axis lists.
struct CoefficientGrid {
  std::vector<std::vector<double>> axis_values;

  std::size_t axes() const { return axis_values.size(); }

  std::size_t total() const {
    std::size_t t = 1;
    for (const auto& axis : axis_values) {
      if (axis.empty()) throw std::invalid_argument("grid: empty axis");
      if (t > SIZE_MAX / axis.size()) return SIZE_MAX;  // saturate
      t *= axis.size();
    }
    return t;
  }
};

/// c equispaced values per axis spanning [-span*sqrt(eigenvalue), +span*sqrt(eigenvalue)].
inline CoefficientGrid make_coefficient_grid(const TissueModel& model,
                                             std::size_t points_per_axis = 10,
                                             double span = 2.0) {
  if (points_per_axis < 1) {
    throw std::invalid_argument("grid: need at least one point per axis");
  }
  CoefficientGrid grid;
  grid.axis_values.reserve(model.num_eigenvectors());
  for (double ev : model.eigenvalues) {
    const double half = span * std::sqrt(std::max(0.0, ev));
    std::vector<double> axis(points_per_axis);
    if (points_per_axis == 1) {
      axis[0] = 0.0;
    } else {
      for (std::size_t i = 0; i < points_per_axis; ++i) {
        axis[i] = -half + 2.0 * half * static_cast<double>(i) /
                              static_cast<double>(points_per_axis - 1);
      }
    }
    grid.axis_values.push_back(std::move(axis));
  }
  return grid;
}

/// PCA over one grade's spectra, packaged as a tissue model.
inline TissueModel fit_tissue_model(const LabeledDataset& dataset, Grade grade,
                                    std::size_t k) {
  const LabeledDataset subset = dataset.grade_subset(grade);
  if (subset.size() < k + 1) {
    throw std::invalid_argument(
        "fit_tissue_model: need at least " + std::to_string(k + 1) +
        " samples of grade '" + std::string(grade_name(grade)) + "', have " +
        std::to_string(subset.size()));
  }
  const PcaModel pca = pca_fit(dataset_matrix(subset), k);
  TissueModel model;
  model.grade = grade;
  model.mean = pca.mean;
  model.eigenvectors = pca.components;
  model.eigenvalues = pca.eigenvalues;
  return model;
}

/// mean + sum_k alphas[k] * eigenvector_k.
inline Spectrum synthesize(const TissueModel& model,
                           const std::vector<double>& alphas) {
  if (alphas.size() != model.num_eigenvectors()) {
    throw std::invalid_argument("synthesize: expected " +
                                std::to_string(model.num_eigenvectors()) +
                                " coefficients, got " +
                                std::to_string(alphas.size()));
  }
  std::vector<double> values = model.mean;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (alphas[k] == 0.0) continue;
    for (std::size_t t = 0; t < values.size(); ++t) {
      values[t] += alphas[k] * model.eigenvectors[k][t];
    }
  }
  return Spectrum(std::move(values));
}

namespace detail {

inline std::array<const TissueModel*, kGradeCount> models_by_grade(
    const std::vector<TissueModel>& models) {
  if (models.size() != kGradeCount) {
    throw std::invalid_argument("expected exactly three tissue models");
  }
  std::array<const TissueModel*, kGradeCount> by_grade{};
  for (const TissueModel& m : models) {
    auto& slot = by_grade[grade_index(m.grade)];
    if (slot != nullptr) {
      throw std::invalid_argument("duplicate tissue model for grade '" +
                                  std::string(grade_name(m.grade)) + "'");
    }
    slot = &m;
  }
  return by_grade;
}

}  // namespace detail

/// Weighted sum of the three per-grade signals, each synthesized with its own
/// coefficients. Models must cover the three grades exactly once.
inline Spectrum mix(const std::vector<TissueModel>& models,
                    const std::vector<std::vector<double>>& alphas,
                    const MixtureWeights& weights) {
  if (alphas.size() != models.size()) {
    throw std::invalid_argument("mix: one coefficient vector per model required");
  }
  detail::models_by_grade(models);  // grade coverage check
  const std::size_t d = models.front().dim();
  std::vector<double> values(d, 0.0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].dim() != d) throw std::invalid_argument("mix: dimension mismatch");
    const Spectrum s = synthesize(models[i], alphas[i]);
    const double w = weights.for_grade(models[i].grade);
    for (std::size_t t = 0; t < d; ++t) values[t] += w * s[t];
  }
  return Spectrum(std::move(values));
}

/// Discretized mixture energy: ||x - Mw||^2 plus smoothness_lambda times the
/// summed squared distance of Mw to each neighbor signal.
inline double mixture_energy(const Spectrum& x,
                             const std::vector<TissueModel>& models,
                             const std::vector<Spectrum>& neighbor_signals,
                             double smoothness_lambda,
                             const MixtureWeights& weights) {
  const auto by_grade = detail::models_by_grade(models);
  const std::size_t d = x.dim();
  std::vector<double> mixed(d, 0.0);
  for (Grade g : kAllGrades) {
    const TissueModel* m = by_grade[grade_index(g)];
    const double w = weights.for_grade(g);
    for (std::size_t t = 0; t < d; ++t) mixed[t] += w * m->mean[t];
  }
  double energy = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    const double r = x[t] - mixed[t];
    energy += r * r;
  }
  for (const Spectrum& nb : neighbor_signals) {
    for (std::size_t t = 0; t < d; ++t) {
      const double r = mixed[t] - nb[t];
      energy += smoothness_lambda * r * r;
    }
  }
  return energy;
}

/// Estimates non-negative mixing weights by minimizing the discretized
/// energy: data term ||x - Mw||^2 plus smoothness_lambda * sum_j ||Mw - s_j||^2,
/// where M holds the three class means as columns.
inline MixtureWeights estimate_weights(const Spectrum& x,
                                       const std::vector<TissueModel>& models,
                                       const std::vector<Spectrum>& neighbor_signals,
                                       double smoothness_lambda = 0.0) {
  if (smoothness_lambda < 0.0) {
    throw std::invalid_argument("estimate_weights: smoothness_lambda must be >= 0");
  }
  const auto by_grade = detail::models_by_grade(models);
  const std::size_t d = x.dim();
  for (Grade g : kAllGrades) {
    if (by_grade[grade_index(g)]->dim() != d) {
      throw std::invalid_argument("estimate_weights: dimension mismatch");
    }
  }
  for (const Spectrum& nb : neighbor_signals) {
    if (nb.dim() != d) {
      throw std::invalid_argument("estimate_weights: neighbor dimension mismatch");
    }
  }

  // Two identical class means make the system rank-deficient.
  for (std::size_t a = 0; a < kGradeCount; ++a) {
    for (std::size_t b = a + 1; b < kGradeCount; ++b) {
      const auto& ma = by_grade[a]->mean;
      const auto& mb = by_grade[b]->mean;
      double diff2 = 0.0, sq = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double r = ma[t] - mb[t];
        diff2 += r * r;
        sq += ma[t] * ma[t] + mb[t] * mb[t];
      }
      if (diff2 <= 1e-24 * std::max(sq, 1e-300)) {
        throw std::invalid_argument(
            "estimate_weights: class means for '" +
            std::string(grade_name(kAllGrades[a])) + "' and '" +
            std::string(grade_name(kAllGrades[b])) + "' are identical");
      }
    }
  }

  // Normal equations of the stacked system [M; sqrt(l)M; ...] w = [x; sqrt(l)s_j; ...]:
  //   (1 + lambda*J) M'M w = M'(x + lambda * sum_j s_j)
  const double j_count = static_cast<double>(neighbor_signals.size());
  Matrix ata(kGradeCount, kGradeCount);
  for (std::size_t a = 0; a < kGradeCount; ++a) {
    for (std::size_t b = a; b < kGradeCount; ++b) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        s += by_grade[a]->mean[t] * by_grade[b]->mean[t];
      }
      s *= 1.0 + smoothness_lambda * j_count;
      ata.at(a, b) = s;
      ata.at(b, a) = s;
    }
  }
  std::vector<double> rhs(d, 0.0);
  for (std::size_t t = 0; t < d; ++t) rhs[t] = x[t];
  for (const Spectrum& nb : neighbor_signals) {
    for (std::size_t t = 0; t < d; ++t) rhs[t] += smoothness_lambda * nb[t];
  }
  std::vector<double> atb(kGradeCount, 0.0);
  for (std::size_t a = 0; a < kGradeCount; ++a) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) s += by_grade[a]->mean[t] * rhs[t];
    atb[a] = s;
  }

  const std::vector<double> w = nnls_normal(ata, atb);
  return MixtureWeights{w[0], w[1], w[2]};
}

/// Enumerates the Cartesian product of the grid's per-axis coefficients and
/// synthesizes one spectrum per tuple. If the grid exceeds max_samples, a
/// seeded uniform subsample without replacement is taken (kept in grid order).
inline LabeledDataset generate_pmm_dataset(const TissueModel& model,
                                           const CoefficientGrid& grid,
                                           std::size_t max_samples,
                                           std::uint64_t seed) {
  if (grid.axes() != model.num_eigenvectors()) {
    throw std::invalid_argument("generate_pmm_dataset: grid axes must match K");
  }
  if (max_samples == 0) {
    throw std::invalid_argument("generate_pmm_dataset: max_samples must be >= 1");
  }
  const std::size_t total = grid.total();

  std::vector<std::size_t> chosen;
  if (total <= max_samples) {
    chosen.resize(total);
    for (std::size_t i = 0; i < total; ++i) chosen[i] = i;
  } else if (total <= (std::size_t{1} << 22)) {
    Rng rng(seed);
    chosen = rng.sample_without_replacement(total, max_samples);
  } else {
    // Grid too large to materialize an index pool; draw distinct indices.
    Rng rng(seed);
    std::set<std::size_t> picked;
    while (picked.size() < max_samples) picked.insert(rng.uniform_index(total));
    chosen.assign(picked.begin(), picked.end());
  }

  LabeledDataset out;
  out.source = "pmm";
  std::vector<double> alphas(grid.axes(), 0.0);
  for (const std::size_t linear : chosen) {
    std::size_t rem = linear;
    for (std::size_t axis = grid.axes(); axis-- > 0;) {
      const std::size_t c = grid.axis_values[axis].size();
      alphas[axis] = grid.axis_values[axis][rem % c];
      rem /= c;
    }
    out.push_back(synthesize(model, alphas), model.grade);
  }
  return out;
}

// --- serialization -------------------------------------------------------
// Text block: header "grade,d,K", then the mean row, K eigenvector rows and
// the eigenvalue row, all comma-separated with round-trip precision.

inline std::string tissue_model_to_text(const TissueModel& model) {
  std::string out;
  out += grade_name(model.grade);
  out += ',';
  out += std::to_string(model.dim());
  out += ',';
  out += std::to_string(model.num_eigenvectors());
  out += '\n';
  const auto append_row = [&out](const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  };
  append_row(model.mean);
  for (const auto& ev : model.eigenvectors) append_row(ev);
  append_row(model.eigenvalues);
  return out;
}

inline TissueModel tissue_model_from_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(trim(line));
  }
  if (lines.size() < 3) throw std::runtime_error("tissue model: truncated input");
  const auto header = split(lines[0], ',');
  if (header.size() != 3) throw std::runtime_error("tissue model: bad header");
  TissueModel model;
  model.grade = parse_grade(header[0]);
  const std::size_t d = static_cast<std::size_t>(parse_int(header[1]));
  const std::size_t k = static_cast<std::size_t>(parse_int(header[2]));
  if (lines.size() != 2 + k + 1) {
    throw std::runtime_error("tissue model: expected " + std::to_string(2 + k + 1) +
                             " lines, got " + std::to_string(lines.size()));
  }
  const auto parse_row = [](std::string_view line, std::size_t expected) {
    const auto fields = split(line, ',');
    if (fields.size() != expected) {
      throw std::runtime_error("tissue model: bad row length");
    }
    std::vector<double> row(expected);
    for (std::size_t i = 0; i < expected; ++i) row[i] = parse_double(trim(fields[i]));
    return row;
  };
  model.mean = parse_row(lines[1], d);
  model.eigenvectors.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    model.eigenvectors.push_back(parse_row(lines[2 + i], d));
  }
  model.eigenvalues = parse_row(lines[2 + k], k);
  return model;
}

inline void save_tissue_model(const TissueModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << tissue_model_to_text(model);
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline TissueModel load_tissue_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return tissue_model_from_text(buf.str());
}

}  // namespace mrs
