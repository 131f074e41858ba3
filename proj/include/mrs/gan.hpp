#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrs/adam.hpp"
#include "mrs/dataset_io.hpp"
#include "mrs/loss.hpp"
#include "mrs/network.hpp"
#include "mrs/rng.hpp"
#include "mrs/spectrum.hpp"

namespace mrs {

enum class GanVariant { FullyConnected, Deep };

inline std::string_view gan_variant_name(GanVariant v) {
  return v == GanVariant::FullyConnected ? "fc" : "deep";
}

inline GanVariant parse_gan_variant(std::string_view s) {
  if (s == "fc") return GanVariant::FullyConnected;
  if (s == "deep") return GanVariant::Deep;
  throw std::runtime_error("unknown gan variant '" + std::string(s) + "'");
}

/// Generator/discriminator pair with per-network Adam state. `grade` and
/// `denorm` are filled in by train() and carried into generation.
struct GanPair {
  Network generator;
  Network discriminator;
  std::size_t latent_dim = 100;
  std::size_t dim = 0;
  AdamState gen_adam, disc_adam;
  GanVariant variant = GanVariant::FullyConnected;
  Grade grade = Grade::Healthy;
  AffineMap denorm;  // generator output -> original amplitude scale
};

/// Training hyperparameters. `batch_size` empty means full-batch training
/// (mandatory for the Deep variant). The reference regimes train for 150,000
/// (fully connected) and 250,000 (deep) epochs; desk-scale runs use far fewer.
struct TrainConfig {
  std::size_t epochs = 1;
  std::optional<std::size_t> batch_size;  // nullopt = full batch
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t seed = 0;
  std::size_t snapshot_every = 100;
};

struct TrainingReport {
  std::vector<std::size_t> snapshot_epochs;
  std::vector<double> d_losses;  // per-snapshot mean discriminator loss
  std::vector<double> g_losses;
  std::size_t epochs_run = 0;
};

/// Fully connected pair: generator 100 -> 1024 (ReLU) -> dim (TanH);
/// discriminator dim -> 1024 (LeakyReLU 0.2) -> 1 (Sigmoid).
inline GanPair build_gan(std::size_t dim) {
  if (dim < 8) throw std::invalid_argument("build_gan: dim must be >= 8");
  GanPair gan;
  gan.variant = GanVariant::FullyConnected;
  gan.latent_dim = 100;
  gan.dim = dim;
  gan.generator.add<DenseLayer>(100, 1024);
  gan.generator.add<ActivationLayer>(Activation::ReLU);
  gan.generator.add<DenseLayer>(1024, dim);
  gan.generator.add<ActivationLayer>(Activation::TanH);
  gan.discriminator.add<DenseLayer>(dim, 1024);
  gan.discriminator.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  gan.discriminator.add<DenseLayer>(1024, 1);
  gan.discriminator.add<ActivationLayer>(Activation::Sigmoid);
  init_params(gan.generator, 1);
  init_params(gan.discriminator, 2);
  return gan;
}

/// Deep pair: dense head to 32 channels x dim/16, then four stride-2
/// transposed convolutions (kernel 4, pad 1, channels 32-16-8-4-1) with
/// batch norm + LeakyReLU between stages and TanH on the output. The
/// discriminator mirrors it with four stride-2 convolutions and a sigmoid
/// head. Requires dim divisible by 16.
inline GanPair build_dcgan(std::size_t dim) {
  if (dim % 16 != 0 || dim == 0) {
    throw std::invalid_argument(
        "build_dcgan: dim must be divisible by 16 (four stride-2 stages)");
  }
  const std::size_t base_len = dim / 16;
  GanPair gan;
  gan.variant = GanVariant::Deep;
  gan.latent_dim = 100;
  gan.dim = dim;

  Network& g = gan.generator;
  g.add<DenseLayer>(100, 32 * base_len);
  g.add<ReshapeLayer>(32, base_len);
  g.add<ConvT1dLayer>(32, 16, 4, 2, 1);
  g.add<BatchNorm1dLayer>(16);
  g.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  g.add<ConvT1dLayer>(16, 8, 4, 2, 1);
  g.add<BatchNorm1dLayer>(8);
  g.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  g.add<ConvT1dLayer>(8, 4, 4, 2, 1);
  g.add<BatchNorm1dLayer>(4);
  g.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  g.add<ConvT1dLayer>(4, 1, 4, 2, 1);
  g.add<ActivationLayer>(Activation::TanH);

  Network& d = gan.discriminator;
  d.add<Conv1dLayer>(1, 4, 4, 2, 1);
  d.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  d.add<Conv1dLayer>(4, 8, 4, 2, 1);
  d.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  d.add<Conv1dLayer>(8, 16, 4, 2, 1);
  d.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  d.add<Conv1dLayer>(16, 32, 4, 2, 1);
  d.add<ActivationLayer>(Activation::LeakyReLU, 0.2);
  d.add<DenseLayer>(32 * base_len, 1);
  d.add<ActivationLayer>(Activation::Sigmoid);

  init_params(gan.generator, 1);
  init_params(gan.discriminator, 2);
  return gan;
}

namespace detail {

inline Tensor latent_batch(std::size_t b, std::size_t latent_dim, Rng& rng) {
  Tensor z({b, latent_dim});
  for (double& v : z.data) v = rng.normal();
  return z;
}

inline Tensor real_tensor(const std::vector<Spectrum>& spectra,
                          const std::vector<std::size_t>& indices,
                          GanVariant variant) {
  const std::size_t b = indices.size();
  const std::size_t d = spectra.front().dim();
  Tensor t(variant == GanVariant::Deep
               ? std::vector<std::size_t>{b, 1, d}
               : std::vector<std::size_t>{b, d});
  for (std::size_t s = 0; s < b; ++s) {
    const Spectrum& sp = spectra[indices[s]];
    for (std::size_t i = 0; i < d; ++i) t.data[s * d + i] = sp[i];
  }
  return t;
}

}  // namespace detail

/// One adversarial update: the discriminator sees the real batch (target 1)
/// and a fresh fake batch (target 0); the generator is then updated on new
/// fakes with target 1, through the discriminator (non-saturating direction).
/// The real batch must already be normalized into (-1, 1).
inline std::pair<double, double> train_step(GanPair& gan, const Tensor& real_batch,
                                            Rng& rng) {
  const std::size_t b = real_batch.batch();
  if (b == 0) throw std::invalid_argument("train_step: empty batch");

  const Tensor ones({b, std::size_t{1}}, 1.0);
  const Tensor zeros({b, std::size_t{1}}, 0.0);

  // Discriminator update on real + fake.
  gan.discriminator.zero_grad();
  const Tensor d_real = gan.discriminator.forward(real_batch, true);
  const BceResult real_loss = bce_loss(d_real, ones);
  gan.discriminator.backward(real_loss.grad);

  Tensor fake = gan.generator.forward(detail::latent_batch(b, gan.latent_dim, rng), true);
  const Tensor d_fake = gan.discriminator.forward(fake, true);
  const BceResult fake_loss = bce_loss(d_fake, zeros);
  gan.discriminator.backward(fake_loss.grad);
  adam_step(gan.discriminator.parameters(), gan.disc_adam);

  // Generator update through the discriminator.
  gan.generator.zero_grad();
  gan.discriminator.zero_grad();
  Tensor fresh = gan.generator.forward(detail::latent_batch(b, gan.latent_dim, rng), true);
  const Tensor d_fresh = gan.discriminator.forward(fresh, true);
  const BceResult gen_loss = bce_loss(d_fresh, ones);
  const Tensor down = gan.discriminator.backward(gen_loss.grad);
  gan.generator.backward(down);
  adam_step(gan.generator.parameters(), gan.gen_adam);

  const double d_loss = real_loss.loss + fake_loss.loss;
  const double g_loss = gen_loss.loss;
  if (!std::isfinite(d_loss) || !std::isfinite(g_loss)) {
    throw std::runtime_error("train_step: non-finite loss");
  }
  return {d_loss, g_loss};
}

/// Trains on a single-grade dataset. Spectra are normalized with one shared
/// min-max map into (-1, 1); the inverse map is stored on the pair for
/// generation. Deep pairs must train full-batch. Deterministic per seed.
inline TrainingReport train(GanPair& gan, const LabeledDataset& class_data,
                            const TrainConfig& config) {
  if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (config.batch_size && *config.batch_size < 1) {
    throw std::invalid_argument("train: batch_size must be >= 1");
  }
  if (gan.variant == GanVariant::Deep && config.batch_size.has_value()) {
    throw std::invalid_argument(
        "train: the deep variant trains on the full set each epoch; "
        "minibatches are not allowed");
  }
  if (class_data.empty()) throw std::invalid_argument("train: empty dataset");
  for (Grade g : class_data.labels) {
    if (g != class_data.labels.front()) {
      throw std::invalid_argument("train: dataset mixes grades; train one model per grade");
    }
  }
  if (class_data.dim() != gan.dim) {
    throw std::invalid_argument("train: dataset dim does not match the model");
  }

  gan.grade = class_data.labels.front();
  gan.denorm = fit_minmax_map(class_data.spectra, -1.0, 1.0);
  std::vector<Spectrum> normalized;
  normalized.reserve(class_data.size());
  for (const Spectrum& s : class_data.spectra) {
    normalized.push_back(apply_map(s, gan.denorm));
  }

  gan.gen_adam.config.lr = config.lr;
  gan.gen_adam.config.beta1 = config.beta1;
  gan.gen_adam.config.beta2 = config.beta2;
  gan.disc_adam.config = gan.gen_adam.config;

  const std::size_t n = normalized.size();
  const std::size_t batch = config.batch_size.value_or(n);
  Rng rng(config.seed);

  TrainingReport report;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.batch_size) rng.shuffle(order);
    double d_sum = 0.0, g_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const std::vector<std::size_t> slice(order.begin() + start,
                                           order.begin() + stop);
      try {
        const auto [d_loss, g_loss] =
            train_step(gan, detail::real_tensor(normalized, slice, gan.variant), rng);
        d_sum += d_loss;
        g_sum += g_loss;
        ++steps;
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " at epoch " +
                                 std::to_string(epoch));
      }
    }
    if (epoch % std::max<std::size_t>(1, config.snapshot_every) == 0 ||
        epoch == config.epochs) {
      report.snapshot_epochs.push_back(epoch);
      report.d_losses.push_back(d_sum / static_cast<double>(steps));
      report.g_losses.push_back(g_sum / static_cast<double>(steps));
    }
    report.epochs_run = epoch;
  }
  return report;
}

/// n spectra drawn from Normal(0,1) latents, denormalized with the given map
/// and labeled with the pair's training grade.
inline LabeledDataset generate(GanPair& gan, std::size_t n, std::uint64_t seed,
                               const AffineMap& denorm) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  Rng rng(seed);
  LabeledDataset out;
  out.source = gan.variant == GanVariant::Deep ? "dcgan" : "gan";
  const Tensor raw =
      gan.generator.forward(detail::latent_batch(n, gan.latent_dim, rng), false);
  const std::size_t d = raw.size() / n;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) {
      values[i] = denorm.scale * raw.data[s * d + i] + denorm.offset;
    }
    out.push_back(Spectrum(std::move(values)), gan.grade);
  }
  return out;
}

// --- snapshot + manifest --------------------------------------------------
// One SFNET1 file per network plus a small manifest pairing them with the
// variant, grade, latent size, seed and normalization map.

inline constexpr const char* kGanMagic = "SFGAN1";

inline void save_gan(const GanPair& gan, const std::string& path,
                     std::uint64_t seed) {
  save_network(gan.generator, path + ".gen");
  save_network(gan.discriminator, path + ".disc");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::string base = path.find('/') == std::string::npos
                               ? path
                               : path.substr(path.find_last_of('/') + 1);
  out << kGanMagic << '\n'
      << "variant=" << gan_variant_name(gan.variant) << '\n'
      << "grade=" << grade_name(gan.grade) << '\n'
      << "latent_dim=" << gan.latent_dim << '\n'
      << "dim=" << gan.dim << '\n'
      << "seed=" << seed << '\n'
      << "scale=" << format_double(gan.denorm.scale) << '\n'
      << "offset=" << format_double(gan.denorm.offset) << '\n'
      << "generator=" << base << ".gen" << '\n'
      << "discriminator=" << base << ".disc" << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline GanPair load_gan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kGanMagic) {
    throw std::runtime_error(path + ": bad magic, expected SFGAN1");
  }
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    const std::string_view trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(path + ": bad manifest line '" + line + "'");
    }
    kv[std::string(trim(trimmed.substr(0, eq)))] =
        std::string(trim(trimmed.substr(eq + 1)));
  }
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(path + ": missing key " + key);
    return it->second;
  };

  GanPair gan;
  gan.variant = parse_gan_variant(need("variant"));
  gan.grade = parse_grade(need("grade"));
  gan.latent_dim = static_cast<std::size_t>(parse_int(need("latent_dim")));
  gan.dim = static_cast<std::size_t>(parse_int(need("dim")));
  gan.denorm.scale = parse_double(need("scale"));
  gan.denorm.offset = parse_double(need("offset"));
  const std::string dir = path.find('/') == std::string::npos
                              ? std::string()
                              : path.substr(0, path.find_last_of('/') + 1);
  gan.generator = load_network(dir + need("generator"));
  gan.discriminator = load_network(dir + need("discriminator"));
  return gan;
}

}  // namespace mrs
