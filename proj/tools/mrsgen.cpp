// Command-line front end: phantom data generation, per-model training,
// sampling, classification, PCA/k-means exploration and full benchmark runs.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mrs/config.hpp"
#include "mrs/dataset_io.hpp"
#include "mrs/eval.hpp"
#include "mrs/forest.hpp"
#include "mrs/gan.hpp"
#include "mrs/kmeans.hpp"
#include "mrs/pca.hpp"
#include "mrs/phantom.hpp"
#include "mrs/pmm.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::map<std::string, std::string> values;
  bool help = false;

  bool has(const std::string& name) const { return values.count(name) > 0; }

  const std::string& require(const std::string& name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw UsageError("missing required flag --" + name);
    return it->second;
  }

  std::string get(const std::string& name, const std::string& fallback) const {
    const auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
  }
};

Flags parse_flags(int argc, char** argv, int start,
                  const std::set<std::string>& allowed) {
  Flags flags;
  for (int i = start; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--help" || arg == "-h") {
      flags.help = true;
      continue;
    }
    if (arg.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + arg + "'");
    const std::string name = arg.substr(2);
    if (allowed.count(name) == 0) throw UsageError("unknown flag --" + name);
    if (i + 1 >= argc) throw UsageError("flag --" + name + " needs a value");
    flags.values[name] = argv[++i];
  }
  return flags;
}

mrs::CliConfig load_config(const Flags& flags) {
  return flags.has("config") ? mrs::CliConfig::load(flags.require("config"))
                             : mrs::CliConfig::defaults();
}

std::uint64_t master_seed(const Flags& flags, const mrs::CliConfig& config) {
  if (flags.has("seed")) return mrs::parse_u64(flags.require("seed"));
  return config.master_seed();
}

std::size_t infer_dim(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!mrs::trim(line).empty()) {
      const auto fields = mrs::split(mrs::trim(line), ',');
      if (fields.size() < 2) {
        throw std::runtime_error(path + ": first row has too few fields");
      }
      return fields.size() - 1;
    }
  }
  throw std::runtime_error(path + ": empty file");
}

void print_main_usage(std::ostream& out) {
  out << "usage: mrsgen <command> [flags]\n"
         "\n"
         "commands:\n"
         "  phantom    write synthetic train/test spectrum CSVs\n"
         "  train      fit a generator (pmm|gan|dcgan) or a forest and save it\n"
         "  generate   sample spectra from a saved generator model\n"
         "  classify   evaluate a saved forest on a spectrum CSV\n"
         "  explore    PCA-2 projection and k-means assignments of a dataset\n"
         "  evaluate   run the full generator-vs-forest benchmark\n"
         "\n"
         "run 'mrsgen <command> --help' for per-command flags.\n";
}

int cmd_phantom(int argc, char** argv) {
  const Flags flags = parse_flags(argc, argv, 2, {"config", "out", "seed"});
  if (flags.help) {
    std::cout << "usage: mrsgen phantom --out DIR [--config FILE] [--seed N]\n"
                 "  --out DIR      output directory for train.csv and test.csv\n"
                 "  --config FILE  key=value config (defaults built in)\n"
                 "  --seed N       master seed override (default from config)\n";
    return 0;
  }
  const mrs::CliConfig config = load_config(flags);
  const std::uint64_t seed = master_seed(flags, config);
  mrs::PhantomConfig phantom =
      mrs::phantom_from_config(config, mrs::derive_seed(seed, 0xDA7A));
  const auto [train_split, test_split] = mrs::generate_phantom(phantom);

  const std::string dir = flags.require("out");
  std::filesystem::create_directories(dir);
  mrs::save_dataset(train_split, dir + "/train.csv");
  mrs::save_dataset(test_split, dir + "/test.csv");
  std::cerr << "wrote " << train_split.size() << " train and " << test_split.size()
            << " test spectra (dim " << train_split.dim() << ") to " << dir << "\n";
  return 0;
}

int cmd_train(int argc, char** argv) {
  const Flags flags =
      parse_flags(argc, argv, 2, {"model", "grade", "data", "out", "config", "seed"});
  if (flags.help) {
    std::cout
        << "usage: mrsgen train --model pmm|gan|dcgan|forest --data FILE --out FILE\n"
           "                    [--grade healthy|low|high] [--config FILE] [--seed N]\n"
           "  --model M      generator kind (pmm, gan, dcgan) or forest\n"
           "  --grade G      tissue grade to train on (generators only)\n"
           "  --data FILE    training spectrum CSV\n"
           "  --out FILE     model output path\n"
           "  --config FILE  hyperparameters (defaults built in)\n"
           "  --seed N       master seed override\n";
    return 0;
  }
  const mrs::CliConfig config = load_config(flags);
  const std::uint64_t seed = master_seed(flags, config);
  const std::string model = flags.require("model");
  const std::string data_path = flags.require("data");
  const std::string out_path = flags.require("out");
  const std::size_t dim = infer_dim(data_path);
  const mrs::LabeledDataset data = mrs::load_dataset(data_path, dim);

  if (model == "forest") {
    const mrs::Forest forest = mrs::fit_forest(
        data, config.get_size("forest.trees"), config.get_size("forest.max_depth"),
        config.get_size("forest.features_per_split"), seed);
    mrs::save_forest(forest, out_path);
    std::cerr << "trained forest of " << forest.trees.size() << " trees on "
              << data.size() << " spectra -> " << out_path << "\n";
    return 0;
  }

  const mrs::Grade grade = mrs::parse_grade(flags.require("grade"));
  if (model == "pmm") {
    const mrs::TissueModel tissue =
        mrs::fit_tissue_model(data, grade, config.get_size("pmm.k"));
    mrs::save_tissue_model(tissue, out_path);
    std::cerr << "fit tissue model (K=" << tissue.num_eigenvectors() << ") for "
              << mrs::grade_name(grade) << " -> " << out_path << "\n";
    return 0;
  }
  if (model == "gan" || model == "dcgan") {
    const bool deep = model == "dcgan";
    mrs::GanPair gan = deep ? mrs::build_dcgan(dim) : mrs::build_gan(dim);
    mrs::init_params(gan.generator, mrs::derive_seed(seed, 1));
    mrs::init_params(gan.discriminator, mrs::derive_seed(seed, 2));
    const mrs::TrainConfig tc =
        mrs::gan_train_config(config, deep, mrs::derive_seed(seed, 3));
    const mrs::TrainingReport report = mrs::train(gan, data.grade_subset(grade), tc);
    for (std::size_t i = 0; i < report.snapshot_epochs.size(); ++i) {
      std::cerr << "epoch " << report.snapshot_epochs[i]
                << " d_loss=" << mrs::format_double(report.d_losses[i])
                << " g_loss=" << mrs::format_double(report.g_losses[i]) << "\n";
    }
    mrs::save_gan(gan, out_path, seed);
    std::cerr << "trained " << model << " on " << mrs::grade_name(grade)
              << " for " << report.epochs_run << " epochs -> " << out_path << "\n";
    return 0;
  }
  throw UsageError("unknown model '" + model + "'");
}

int cmd_generate(int argc, char** argv) {
  const Flags flags =
      parse_flags(argc, argv, 2, {"model-file", "n", "out", "svg", "config", "seed"});
  if (flags.help) {
    std::cout << "usage: mrsgen generate --model-file FILE --n N --out FILE\n"
                 "                       [--svg FILE] [--config FILE] [--seed N]\n"
                 "  --model-file F  saved pmm (.pmm text) or gan manifest\n"
                 "  --n N           number of spectra to generate\n"
                 "  --out FILE      output spectrum CSV\n"
                 "  --svg FILE      optional overlay plot\n";
    return 0;
  }
  const mrs::CliConfig config = load_config(flags);
  const std::uint64_t seed = master_seed(flags, config);
  const std::string model_path = flags.require("model-file");
  const std::size_t n = static_cast<std::size_t>(mrs::parse_int(flags.require("n")));
  if (n < 1) throw UsageError("--n must be at least 1");

  std::ifstream probe(model_path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open " + model_path);
  std::string first_line;
  std::getline(probe, first_line);
  probe.close();

  mrs::LabeledDataset generated;
  if (mrs::trim(first_line) == mrs::kGanMagic) {
    mrs::GanPair gan = mrs::load_gan(model_path);
    generated = mrs::generate(gan, n, seed, gan.denorm);
  } else if (mrs::trim(first_line) == mrs::kForestMagic) {
    throw std::runtime_error(model_path + " is a forest; use 'classify' instead");
  } else {
    const mrs::TissueModel tissue = mrs::load_tissue_model(model_path);
    const mrs::CoefficientGrid grid = mrs::make_coefficient_grid(
        tissue, config.get_size("pmm.grid_points"), config.get_real("pmm.grid_span"));
    generated = mrs::generate_pmm_dataset(tissue, grid, n, seed);
  }

  mrs::save_dataset(generated, flags.require("out"));
  if (flags.has("svg")) {
    std::vector<mrs::Spectrum> slice;
    const std::size_t cap = config.get_size("experiment.plot_samples");
    for (std::size_t i = 0; i < std::min(cap, generated.size()); ++i) {
      slice.push_back(generated.spectra[i]);
    }
    mrs::export_plot(slice, generated.labels.front(), flags.require("svg"));
  }
  std::cerr << "generated " << generated.size() << " spectra -> "
            << flags.require("out") << "\n";
  return 0;
}

int cmd_classify(int argc, char** argv) {
  const Flags flags = parse_flags(argc, argv, 2, {"forest", "data"});
  if (flags.help) {
    std::cout << "usage: mrsgen classify --forest FILE --data FILE\n"
                 "  --forest FILE  saved forest (SFRF1)\n"
                 "  --data FILE    labeled spectrum CSV to score\n"
                 "prints per-grade and overall accuracy as CSV on stdout.\n";
    return 0;
  }
  const mrs::Forest forest = mrs::load_forest(flags.require("forest"));
  const mrs::LabeledDataset data =
      mrs::load_dataset(flags.require("data"), forest.dim);
  const mrs::AccuracyReport report = mrs::accuracy(forest, data);
  std::cout << "grade,accuracy\n";
  for (const auto& [grade, acc] : report.per_grade) {
    std::cout << mrs::grade_name(grade) << "," << mrs::format_double(acc) << "\n";
  }
  std::cout << "overall," << mrs::format_double(report.overall) << "\n";
  return 0;
}

int cmd_explore(int argc, char** argv) {
  const Flags flags = parse_flags(argc, argv, 2, {"data", "out", "clusters", "seed"});
  if (flags.help) {
    std::cout << "usage: mrsgen explore --data FILE --out DIR [--clusters K] [--seed N]\n"
                 "  --data FILE   labeled spectrum CSV\n"
                 "  --out DIR     writes pca2.csv (pc1,pc2,grade) and\n"
                 "                kmeans.csv (pc1,pc2,cluster)\n"
                 "  --clusters K  number of k-means clusters (default 3)\n";
    return 0;
  }
  const std::string data_path = flags.require("data");
  const mrs::LabeledDataset data = mrs::load_dataset(data_path, infer_dim(data_path));
  const std::uint64_t seed =
      flags.has("seed") ? mrs::parse_u64(flags.require("seed")) : 42;
  const std::size_t k =
      flags.has("clusters")
          ? static_cast<std::size_t>(mrs::parse_int(flags.require("clusters")))
          : 3;

  const mrs::PcaModel pca = mrs::pca_fit(mrs::dataset_matrix(data), 2);
  mrs::Matrix projected(data.size(), 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto coords = mrs::pca_project(pca, data.spectra[i].values);
    projected.at(i, 0) = coords[0];
    projected.at(i, 1) = coords[1];
  }
  const mrs::KmeansResult clusters = mrs::kmeans(projected, k, seed);

  const std::string dir = flags.require("out");
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/pca2.csv", std::ios::binary);
    out << "pc1,pc2,grade\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      out << mrs::format_double(projected.at(i, 0)) << ","
          << mrs::format_double(projected.at(i, 1)) << ","
          << mrs::grade_name(data.labels[i]) << "\n";
    }
  }
  {
    std::ofstream out(dir + "/kmeans.csv", std::ios::binary);
    out << "pc1,pc2,cluster\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      out << mrs::format_double(projected.at(i, 0)) << ","
          << mrs::format_double(projected.at(i, 1)) << ","
          << clusters.assignments[i] << "\n";
    }
  }
  std::cerr << "projected " << data.size() << " spectra; k-means inertia "
            << mrs::format_double(clusters.inertia) << " -> " << dir << "\n";
  return 0;
}

int cmd_evaluate(int argc, char** argv) {
  const Flags flags = parse_flags(argc, argv, 2, {"config", "out", "seed"});
  if (flags.help) {
    std::cout << "usage: mrsgen evaluate --out DIR [--config FILE] [--seed N]\n"
                 "  --out DIR      report directory (report.csv, samples, plots)\n"
                 "  --config FILE  experiment configuration\n"
                 "  --seed N       master seed override\n";
    return 0;
  }
  const mrs::CliConfig config = load_config(flags);
  const std::uint64_t seed = master_seed(flags, config);
  const mrs::ExperimentConfig exp = mrs::experiment_from_config(config, seed);
  const std::string dir = flags.require("out");
  const mrs::ExperimentReport report = mrs::run_experiment(exp, dir);
  for (const mrs::CellResult& cell : report.cells) {
    std::cerr << cell.generator << "/" << mrs::grade_name(cell.grade)
              << ": accuracy="
              << (cell.accuracy ? mrs::format_double(*cell.accuracy) : "-")
              << " mse=" << (cell.mse ? mrs::format_double(*cell.mse) : "-")
              << " [" << cell.status << "]\n";
  }
  std::cerr << "report written to " << dir << "/report.csv ("
            << mrs::format_double(report.wall_seconds) << "s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_main_usage(std::cerr);
    return 1;
  }
  const std::string command = argv[1];
  if (command == "--help" || command == "-h" || command == "help") {
    print_main_usage(std::cout);
    return 0;
  }
  try {
    if (command == "phantom") return cmd_phantom(argc, argv);
    if (command == "train") return cmd_train(argc, argv);
    if (command == "generate") return cmd_generate(argc, argv);
    if (command == "classify") return cmd_classify(argc, argv);
    if (command == "explore") return cmd_explore(argc, argv);
    if (command == "evaluate") return cmd_evaluate(argc, argv);
    throw UsageError("unknown command '" + command + "'");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    print_main_usage(std::cerr);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
