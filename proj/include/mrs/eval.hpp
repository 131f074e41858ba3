#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrs/dataset_io.hpp"
#include "mrs/forest.hpp"
#include "mrs/gan.hpp"
#include "mrs/phantom.hpp"
#include "mrs/pmm.hpp"
#include "mrs/spectrum.hpp"

namespace mrs {

/// Mean squared pointwise difference between the generated spectra and the
/// reference class mean: (1/(N*d)) * sum_samples sum_t (g(t) - mu(t))^2.
inline double mse_to_mean(const LabeledDataset& generated,
                          const Spectrum& reference_mean) {
  if (generated.empty()) throw std::invalid_argument("mse_to_mean: no spectra");
  const std::size_t d = reference_mean.dim();
  if (generated.dim() != d) {
    throw std::invalid_argument("mse_to_mean: dimension mismatch");
  }
  double sum = 0.0;
  for (const Spectrum& s : generated.spectra) {
    for (std::size_t t = 0; t < d; ++t) {
      const double diff = s[t] - reference_mean[t];
      sum += diff * diff;
    }
  }
  return sum / (static_cast<double>(generated.size()) * static_cast<double>(d));
}

// --- plotting ---------------------------------------------------------------

inline std::string_view grade_color(Grade g) {
  switch (g) {
    case Grade::Healthy: return "#2ca02c";
    case Grade::Low: return "#1f77b4";
    case Grade::High: return "#d62728";
  }
  throw std::invalid_argument("invalid grade value");
}

/// Self-contained SVG line chart overlaying the spectra (one <path> each,
/// stroke colored by grade) plus a companion CSV of the series next to it.
inline void export_plot(const std::vector<Spectrum>& spectra, Grade grade,
                        const std::string& path) {
  if (spectra.empty()) throw std::invalid_argument("export_plot: no spectra");
  const std::size_t d = spectra.front().dim();
  for (const Spectrum& s : spectra) {
    if (s.dim() != d) throw std::invalid_argument("export_plot: ragged spectra");
  }

  double lo = spectra[0][0], hi = spectra[0][0];
  for (const Spectrum& s : spectra) {
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) {  // flat data still renders as a centered line
    hi += 1.0;
    lo -= 1.0;
  }

  const double width = 800.0, height = 400.0, margin = 40.0;
  const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
  const auto x_of = [&](std::size_t t) {
    return margin + (d == 1 ? 0.5 * plot_w
                            : plot_w * static_cast<double>(t) /
                                  static_cast<double>(d - 1));
  };
  const auto y_of = [&](double v) {
    return margin + plot_h * (1.0 - (v - lo) / (hi - lo));
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "  <line x1=\"" << margin << "\" y1=\"" << height - margin
      << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"#333333\"/>\n";
  svg << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
      << margin << "\" y2=\"" << height - margin << "\" stroke=\"#333333\"/>\n";
  svg << "  <text x=\"" << width - margin << "\" y=\"" << height - margin / 4
      << "\" font-size=\"12\" text-anchor=\"end\">sample index</text>\n";
  svg << "  <text x=\"" << margin / 4 << "\" y=\"" << margin
      << "\" font-size=\"12\">amplitude</text>\n";

  const std::string_view color = grade_color(grade);
  for (const Spectrum& s : spectra) {
    svg << "  <path fill=\"none\" stroke=\"" << color
        << "\" stroke-opacity=\"0.6\" d=\"";
    for (std::size_t t = 0; t < d; ++t) {
      svg << (t == 0 ? "M" : " L") << format_double(x_of(t)) << " "
          << format_double(y_of(s[t]));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg.str();
  if (!out) throw std::runtime_error("write failed for " + path);

  // Companion CSV in the spectrum interchange format.
  std::string csv_path = path;
  const std::size_t dot = csv_path.find_last_of('.');
  const std::size_t slash = csv_path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    csv_path.resize(dot);
  }
  csv_path += ".csv";
  LabeledDataset series;
  for (const Spectrum& s : spectra) series.push_back(s, grade);
  save_dataset(series, csv_path);
}

// --- experiment runner --------------------------------------------------------

struct ExperimentConfig {
  PhantomConfig phantom;           // used when train/test paths are empty
  std::string train_path, test_path;
  std::vector<std::string> generators{"pmm", "gan", "dcgan"};
  std::size_t pmm_k = 3;
  std::size_t pmm_grid_points = 10;
  double pmm_grid_span = 2.0;
  TrainConfig gan_train;    // batch_size set; desk-scale epochs
  TrainConfig dcgan_train;  // full batch
  std::size_t forest_trees = 100;
  std::size_t forest_depth = 4;
  std::size_t forest_features = 0;  // 0 = ceil(sqrt(dim))
  std::size_t samples_multiplier = 4;
  std::size_t plot_samples = 16;
  std::uint64_t seed = 42;
};

struct CellResult {
  std::string generator;
  Grade grade = Grade::Healthy;
  std::optional<double> accuracy;
  std::optional<double> mse;  // empty for ground-truth rows
  std::string status = "ok";
  std::uint64_t seed = 0;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::uint64_t master_seed = 0;
  double wall_seconds = 0.0;  // not part of the CSV
};

inline constexpr const char* kReportHeader =
    "generator,grade,accuracy,mse_to_mean,status,seed";

inline std::string report_to_csv(const ExperimentReport& report) {
  std::string out = kReportHeader;
  out += '\n';
  for (const CellResult& cell : report.cells) {
    out += cell.generator;
    out += ',';
    out += grade_name(cell.grade);
    out += ',';
    if (cell.accuracy) out += format_double(*cell.accuracy);
    out += ',';
    if (cell.mse) out += format_double(*cell.mse);
    out += ',';
    out += cell.status;
    out += ',';
    out += std::to_string(cell.seed);
    out += '\n';
  }
  return out;
}

inline ExperimentReport report_from_csv(std::string_view csv) {
  ExperimentReport report;
  std::vector<std::string_view> lines;
  for (std::string_view line : split(csv, '\n')) {
    if (!trim(line).empty()) lines.push_back(trim(line));
  }
  if (lines.empty() || lines[0] != kReportHeader) {
    throw std::runtime_error("report: bad header");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 6) throw std::runtime_error("report: bad row");
    CellResult cell;
    cell.generator = std::string(fields[0]);
    cell.grade = parse_grade(fields[1]);
    if (!fields[2].empty()) cell.accuracy = parse_double(fields[2]);
    if (!fields[3].empty()) cell.mse = parse_double(fields[3]);
    cell.status = std::string(fields[4]);
    cell.seed = parse_u64(fields[5]);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

namespace detail {

inline std::string sanitize_status(std::string message) {
  for (char& c : message) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return message.empty() ? "failed" : message;
}

inline std::vector<Spectrum> plot_slice(const LabeledDataset& ds, std::size_t cap) {
  std::vector<Spectrum> out;
  for (std::size_t i = 0; i < std::min(cap, ds.size()); ++i) {
    out.push_back(ds.spectra[i]);
  }
  return out;
}

}  // namespace detail

/// Full benchmark: per grade, trains each configured generator on the train
/// split and samples from it; per generator, fits a forest on the union of
/// its generated data; a ground-truth forest is fit on the real training
/// split. Every forest is evaluated on the held-out test split, and each
/// generated slice is compared to its class mean. Failures are recorded per
/// cell and the run continues. Deterministic for a fixed config and seed.
inline ExperimentReport run_experiment(const ExperimentConfig& config,
                                       const std::string& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);

  LabeledDataset train_split, test_split;
  if (!config.train_path.empty()) {
    train_split = load_dataset(config.train_path, config.phantom.dim);
    test_split = load_dataset(config.test_path, config.phantom.dim);
  } else {
    PhantomConfig phantom = config.phantom;
    phantom.seed = derive_seed(config.seed, 0xDA7A);
    std::tie(train_split, test_split) = generate_phantom(phantom);
  }
  const std::size_t dim = train_split.dim();

  std::array<Spectrum, kGradeCount> means;
  for (Grade g : kAllGrades) means[grade_index(g)] = class_mean(train_split, g);

  ExperimentReport report;
  report.master_seed = config.seed;

  const auto cell_seed = [&](std::size_t generator_idx, Grade g) {
    return derive_seed(config.seed, 0x100 + generator_idx * kGradeCount + grade_index(g));
  };

  const auto fit_and_score =
      [&](const std::string& name, const LabeledDataset& data,
          std::vector<CellResult*> cells) {
        try {
          const Forest forest =
              fit_forest(data, config.forest_trees, config.forest_depth,
                         config.forest_features, derive_seed(config.seed, 0xF0F0));
          const AccuracyReport acc = accuracy(forest, test_split);
          save_forest(forest, out_dir + "/" + name + "_forest.txt");
          for (CellResult* cell : cells) {
            const auto it = acc.per_grade.find(cell->grade);
            if (it != acc.per_grade.end()) cell->accuracy = it->second;
          }
        } catch (const std::exception& e) {
          for (CellResult* cell : cells) {
            if (cell->status == "ok") {
              cell->status = detail::sanitize_status(e.what());
            }
          }
        }
      };

  for (std::size_t gi = 0; gi < config.generators.size(); ++gi) {
    const std::string& name = config.generators[gi];
    LabeledDataset pool;
    pool.source = name;
    std::vector<CellResult> cells;

    for (Grade g : kAllGrades) {
      CellResult cell;
      cell.generator = name;
      cell.grade = g;
      cell.seed = cell_seed(gi, g);
      const std::size_t n_samples =
          config.samples_multiplier * std::max<std::size_t>(1, train_split.count(g));
      try {
        LabeledDataset generated;
        if (name == "pmm") {
          const TissueModel model = fit_tissue_model(train_split, g, config.pmm_k);
          const CoefficientGrid grid = make_coefficient_grid(
              model, config.pmm_grid_points, config.pmm_grid_span);
          generated = generate_pmm_dataset(model, grid, n_samples, cell.seed);
        } else if (name == "gan" || name == "dcgan") {
          GanPair gan = name == "gan" ? build_gan(dim) : build_dcgan(dim);
          init_params(gan.generator, derive_seed(cell.seed, 1));
          init_params(gan.discriminator, derive_seed(cell.seed, 2));
          TrainConfig tc = name == "gan" ? config.gan_train : config.dcgan_train;
          tc.seed = derive_seed(cell.seed, 3);
          train(gan, train_split.grade_subset(g), tc);
          generated = generate(gan, n_samples, derive_seed(cell.seed, 4), gan.denorm);
        } else {
          throw std::invalid_argument("unknown generator '" + name + "'");
        }
        cell.mse = mse_to_mean(generated, means[grade_index(g)]);
        const std::string stem = out_dir + "/" + name + "_" + std::string(grade_name(g));
        save_dataset(generated, stem + "_samples.csv");
        export_plot(detail::plot_slice(generated, config.plot_samples), g,
                    stem + ".svg");
        for (std::size_t i = 0; i < generated.size(); ++i) {
          pool.push_back(generated.spectra[i], generated.labels[i]);
        }
      } catch (const std::exception& e) {
        cell.status = detail::sanitize_status(e.what());
      }
      cells.push_back(std::move(cell));
    }

    report.cells.reserve(report.cells.size() + cells.size());
    const std::size_t first = report.cells.size();
    for (CellResult& c : cells) report.cells.push_back(std::move(c));
    std::vector<CellResult*> cell_ptrs;
    for (std::size_t i = first; i < report.cells.size(); ++i) {
      cell_ptrs.push_back(&report.cells[i]);
    }
    if (pool.empty()) {
      for (CellResult* cell : cell_ptrs) {
        if (cell->status == "ok") cell->status = "no generated data";
      }
    } else {
      fit_and_score(name, pool, cell_ptrs);
    }
  }

  // Ground-truth forest: real training data only.
  if (train_split.source != "real") {
    throw std::logic_error("experiment: ground-truth split lost its provenance");
  }
  {
    const std::size_t first = report.cells.size();
    for (Grade g : kAllGrades) {
      CellResult cell;
      cell.generator = "gt";
      cell.grade = g;
      cell.seed = config.seed;
      report.cells.push_back(std::move(cell));
    }
    std::vector<CellResult*> cell_ptrs;
    for (std::size_t i = first; i < report.cells.size(); ++i) {
      cell_ptrs.push_back(&report.cells[i]);
    }
    fit_and_score("gt", train_split, cell_ptrs);
  }

  const std::string csv = report_to_csv(report);
  {
    std::ofstream out(out_dir + "/report.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_dir + "/report.csv");
    out << csv;
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  {
    std::ofstream meta(out_dir + "/run_meta.txt", std::ios::binary);
    meta << "master_seed=" << config.seed << '\n'
         << "dim=" << dim << '\n'
         << "train_samples=" << train_split.size() << '\n'
         << "test_samples=" << test_split.size() << '\n'
         << "wall_seconds=" << format_double(report.wall_seconds) << '\n';
  }
  return report;
}

}  // namespace mrs
