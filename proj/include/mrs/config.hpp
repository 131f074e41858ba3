#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mrs/eval.hpp"
#include "mrs/phantom.hpp"
#include "mrs/text.hpp"

namespace mrs {

/// Flat key=value configuration with [section] headers. Every known key has a
/// default; unknown keys and values of the wrong type are rejected at parse
/// time. Keys are addressed as "section.key".
class CliConfig {
 public:
  enum class Type { Int, Real, Str };

  static const std::map<std::string, std::pair<Type, std::string>>& schema() {
    static const std::map<std::string, std::pair<Type, std::string>> kSchema = {
        {"phantom.dim", {Type::Int, "64"}},
        {"phantom.train_healthy", {Type::Int, "70"}},
        {"phantom.train_low", {Type::Int, "20"}},
        {"phantom.train_high", {Type::Int, "30"}},
        {"phantom.test_healthy", {Type::Int, "9"}},
        {"phantom.test_low", {Type::Int, "3"}},
        {"phantom.test_high", {Type::Int, "5"}},
        {"phantom.jitter", {Type::Real, "0.15"}},
        {"phantom.noise_std", {Type::Real, "0.01"}},
        // Peak templates: comma-separated center:width:amplitude triples,
        // center and width as fractions of dim.
        {"phantom.peaks_healthy",
         {Type::Str, "0.2:0.015:1,0.45:0.015:0.55,0.75:0.015:0.3"}},
        {"phantom.peaks_low",
         {Type::Str, "0.2:0.015:0.6,0.45:0.015:0.95,0.75:0.015:0.45"}},
        {"phantom.peaks_high",
         {Type::Str, "0.2:0.015:0.35,0.45:0.015:0.5,0.75:0.015:1.1"}},
        {"pmm.k", {Type::Int, "3"}},
        {"pmm.grid_points", {Type::Int, "10"}},
        {"pmm.grid_span", {Type::Real, "2"}},
        {"gan.epochs", {Type::Int, "500"}},
        {"gan.batch_size", {Type::Int, "16"}},
        {"gan.lr", {Type::Real, "0.0002"}},
        {"gan.beta1", {Type::Real, "0.5"}},
        {"gan.beta2", {Type::Real, "0.999"}},
        {"gan.snapshot_every", {Type::Int, "100"}},
        {"dcgan.epochs", {Type::Int, "500"}},
        {"dcgan.lr", {Type::Real, "0.0002"}},
        {"dcgan.beta1", {Type::Real, "0.5"}},
        {"dcgan.beta2", {Type::Real, "0.999"}},
        {"dcgan.snapshot_every", {Type::Int, "100"}},
        {"forest.trees", {Type::Int, "100"}},
        {"forest.max_depth", {Type::Int, "4"}},
        {"forest.features_per_split", {Type::Int, "0"}},  // 0 = ceil(sqrt(dim))
        {"experiment.seed", {Type::Int, "42"}},
        {"experiment.generators", {Type::Str, "pmm,gan,dcgan"}},
        {"experiment.samples_multiplier", {Type::Int, "4"}},
        {"experiment.plot_samples", {Type::Int, "16"}},
    };
    return kSchema;
  }

  static CliConfig defaults() {
    CliConfig config;
    for (const auto& [key, spec] : schema()) config.values_[key] = spec.second;
    return config;
  }

  static CliConfig parse(std::string_view text, const std::string& origin) {
    CliConfig config = defaults();
    std::string section;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
      ++line_no;
      std::string_view line = raw;
      const std::size_t hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::string where = origin + ":" + std::to_string(line_no);

      if (line.front() == '[') {
        if (line.back() != ']') throw std::runtime_error(where + ": bad section");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw std::runtime_error(where + ": expected key = value");
      }
      const std::string key =
          (section.empty() ? "" : section + ".") + std::string(trim(line.substr(0, eq)));
      const std::string value{trim(line.substr(eq + 1))};
      const auto spec = schema().find(key);
      if (spec == schema().end()) {
        throw std::runtime_error(where + ": unknown key '" + key + "'");
      }
      try {
        if (spec->second.first == Type::Int) parse_int(value);
        if (spec->second.first == Type::Real) parse_double(value);
      } catch (const std::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
      }
      config.values_[key] = value;
    }
    return config;
  }

  static CliConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
  }

  std::int64_t get_int(const std::string& key) const { return parse_int(raw(key)); }
  double get_real(const std::string& key) const { return parse_double(raw(key)); }
  const std::string& get_str(const std::string& key) const { return raw(key); }

  std::size_t get_size(const std::string& key) const {
    const std::int64_t v = get_int(key);
    if (v < 0) throw std::runtime_error(key + " must be non-negative");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t master_seed() const {
    return static_cast<std::uint64_t>(get_int("experiment.seed"));
  }

 private:
  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("unknown config key " + key);
    return it->second;
  }

  std::map<std::string, std::string> values_;
};

/// "c:w:a,c:w:a,..." with center/width as fractions of dim.
inline std::vector<Peak> parse_peaks(std::string_view text, std::size_t dim) {
  std::vector<Peak> peaks;
  for (std::string_view triple : split(text, ',')) {
    triple = trim(triple);
    if (triple.empty()) continue;
    const auto parts = split(triple, ':');
    if (parts.size() != 3) {
      throw std::runtime_error("bad peak '" + std::string(triple) +
                               "', expected center:width:amplitude");
    }
    Peak p;
    p.center = parse_double(trim(parts[0])) * static_cast<double>(dim);
    p.width = parse_double(trim(parts[1])) * static_cast<double>(dim);
    p.amplitude = parse_double(trim(parts[2]));
    peaks.push_back(p);
  }
  if (peaks.empty()) throw std::runtime_error("empty peak list");
  return peaks;
}

inline PhantomConfig phantom_from_config(const CliConfig& config,
                                         std::uint64_t seed) {
  PhantomConfig phantom;
  phantom.dim = config.get_size("phantom.dim");
  phantom.amplitude_jitter = config.get_real("phantom.jitter");
  phantom.noise_std = config.get_real("phantom.noise_std");
  phantom.train_counts = {config.get_size("phantom.train_healthy"),
                          config.get_size("phantom.train_low"),
                          config.get_size("phantom.train_high")};
  phantom.test_counts = {config.get_size("phantom.test_healthy"),
                         config.get_size("phantom.test_low"),
                         config.get_size("phantom.test_high")};
  phantom.peaks[grade_index(Grade::Healthy)] =
      parse_peaks(config.get_str("phantom.peaks_healthy"), phantom.dim);
  phantom.peaks[grade_index(Grade::Low)] =
      parse_peaks(config.get_str("phantom.peaks_low"), phantom.dim);
  phantom.peaks[grade_index(Grade::High)] =
      parse_peaks(config.get_str("phantom.peaks_high"), phantom.dim);
  phantom.seed = seed;
  return phantom;
}

inline TrainConfig gan_train_config(const CliConfig& config, bool deep,
                                    std::uint64_t seed) {
  TrainConfig tc;
  const std::string section = deep ? "dcgan" : "gan";
  tc.epochs = config.get_size(section + ".epochs");
  if (!deep) tc.batch_size = config.get_size("gan.batch_size");
  tc.lr = config.get_real(section + ".lr");
  tc.beta1 = config.get_real(section + ".beta1");
  tc.beta2 = config.get_real(section + ".beta2");
  tc.snapshot_every = config.get_size(section + ".snapshot_every");
  tc.seed = seed;
  return tc;
}

inline ExperimentConfig experiment_from_config(const CliConfig& config,
                                               std::uint64_t seed) {
  ExperimentConfig exp;
  exp.seed = seed;
  exp.phantom = phantom_from_config(config, seed);
  exp.pmm_k = config.get_size("pmm.k");
  exp.pmm_grid_points = config.get_size("pmm.grid_points");
  exp.pmm_grid_span = config.get_real("pmm.grid_span");
  exp.gan_train = gan_train_config(config, false, seed);
  exp.dcgan_train = gan_train_config(config, true, seed);
  exp.forest_trees = config.get_size("forest.trees");
  exp.forest_depth = config.get_size("forest.max_depth");
  exp.forest_features = config.get_size("forest.features_per_split");
  exp.samples_multiplier = config.get_size("experiment.samples_multiplier");
  exp.plot_samples = config.get_size("experiment.plot_samples");
  exp.generators.clear();
  for (std::string_view name : split(config.get_str("experiment.generators"), ',')) {
    name = trim(name);
    if (name.empty()) continue;
    if (name != "pmm" && name != "gan" && name != "dcgan") {
      throw std::runtime_error("unknown generator '" + std::string(name) + "'");
    }
    exp.generators.push_back(std::string(name));
  }
  if (exp.generators.empty()) {
    throw std::runtime_error("experiment.generators selects no generator");
  }
  return exp;
}

}  // namespace mrs
