#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "mrs/spectrum.hpp"
#include "mrs/text.hpp"

namespace mrs {

/// Invertible affine map: original = scale * normalized + offset.
struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;
};

struct NormalizedSpectrum {
  Spectrum spectrum;
  AffineMap map;
};

// CSV interchange format: one sample per row, dim comma-separated amplitudes
// followed by a grade token; newline-terminated, no header.

inline std::string dataset_to_csv(const LabeledDataset& dataset) {
  if (dataset.empty()) {
    throw std::invalid_argument("cannot write an empty dataset");
  }
  std::string out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.spectra[i].values) {
      out += format_double(v);
      out += ',';
    }
    out += grade_name(dataset.labels[i]);
    out += '\n';
  }
  return out;
}

inline LabeledDataset dataset_from_csv(std::string_view csv, std::size_t dim,
                                       const std::string& origin = "input") {
  LabeledDataset dataset;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    const std::string_view line = trim(csv.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split(line, ',');
    if (fields.size() != dim + 1) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(dim + 1) +
                               " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      try {
        values[i] = parse_double(trim(fields[i]));
      } catch (const std::exception& e) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " +
                                 e.what());
      }
    }
    Grade grade;
    try {
      grade = parse_grade(trim(fields[dim]));
    } catch (const std::exception& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    dataset.push_back(Spectrum(std::move(values)), grade);
  }
  if (dataset.empty()) {
    throw std::runtime_error(origin + ": no samples found");
  }
  return dataset;
}

inline LabeledDataset load_dataset(const std::string& path, std::size_t dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_csv(buf.str(), dim, path);
}

inline void save_dataset(const LabeledDataset& dataset, const std::string& path) {
  const std::string csv = dataset_to_csv(dataset);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csv;
  if (!out) throw std::runtime_error("write failed for " + path);
}

/// Affine map of [min(values), max(values)] onto [lo, hi], returned together
/// with the inverse map parameters. Errors on a constant spectrum.
inline NormalizedSpectrum normalize_minmax(const Spectrum& s, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("normalize_minmax: lo must be < hi");
  if (s.dim() == 0) throw std::invalid_argument("normalize_minmax: empty spectrum");
  double mn = s[0], mx = s[0];
  for (double v : s.values) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  if (mx == mn) {
    throw std::invalid_argument(
        "normalize_minmax: constant spectrum has no defined scale");
  }
  AffineMap map;
  map.scale = (mx - mn) / (hi - lo);
  map.offset = mn - lo * map.scale;
  std::vector<double> out(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) {
    out[i] = (s[i] - map.offset) / map.scale;
  }
  return NormalizedSpectrum{Spectrum(std::move(out)), map};
}

inline Spectrum denormalize(const Spectrum& s, const AffineMap& map) {
  std::vector<double> out(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) out[i] = map.scale * s[i] + map.offset;
  return Spectrum(std::move(out));
}

/// One shared map for a whole collection: global min/max onto [lo, hi].
inline AffineMap fit_minmax_map(const std::vector<Spectrum>& spectra, double lo,
                                double hi) {
  if (!(lo < hi)) throw std::invalid_argument("fit_minmax_map: lo must be < hi");
  if (spectra.empty()) throw std::invalid_argument("fit_minmax_map: no spectra");
  double mn = spectra[0][0], mx = spectra[0][0];
  for (const Spectrum& s : spectra) {
    for (double v : s.values) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  }
  if (mx == mn) {
    throw std::invalid_argument("fit_minmax_map: constant data has no defined scale");
  }
  AffineMap map;
  map.scale = (mx - mn) / (hi - lo);
  map.offset = mn - lo * map.scale;
  return map;
}

inline Spectrum apply_map(const Spectrum& s, const AffineMap& map) {
  std::vector<double> out(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) {
    out[i] = (s[i] - map.offset) / map.scale;
  }
  return Spectrum(std::move(out));
}

/// Pointwise arithmetic mean of all spectra labeled with the given grade.
inline Spectrum class_mean(const LabeledDataset& dataset, Grade grade) {
  const std::size_t d = dataset.dim();
  std::vector<double> sum(d, 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.labels[i] != grade) continue;
    for (std::size_t t = 0; t < d; ++t) sum[t] += dataset.spectra[i][t];
    ++n;
  }
  if (n == 0) {
    throw std::invalid_argument("class_mean: no spectra with grade '" +
                                std::string(grade_name(grade)) + "'");
  }
  for (double& v : sum) v /= static_cast<double>(n);
  return Spectrum(std::move(sum));
}

}  // namespace mrs
