#include <gtest/gtest.h>

#include <cmath>

#include "mrs/eval.hpp"
#include "mrs/gan.hpp"
#include "mrs/phantom.hpp"
#include "test_util.hpp"

using namespace mrs;

namespace {

LabeledDataset healthy_class(std::size_t dim, std::uint64_t seed,
                             std::size_t count = 70) {
  PhantomConfig config = default_phantom_config(dim);
  config.seed = seed;
  config.train_counts = {count, 2, 2};
  config.test_counts = {1, 1, 1};
  return generate_phantom(config).first.grade_subset(Grade::Healthy);
}

std::vector<double> flat_params(const Network& net) {
  std::vector<double> out;
  for (const ParamRef& p : net.parameters()) {
    out.insert(out.end(), p.value->begin(), p.value->end());
  }
  return out;
}

void zero_params(Network& net) {
  for (const ParamRef& p : net.parameters()) {
    std::fill(p.value->begin(), p.value->end(), 0.0);
  }
}

}  // namespace

TEST(BuildGan, MatchesReferenceStack) {
  GanPair gan = build_gan(1024);
  const std::vector<std::string> gen_expected{"dense 100 1024", "relu",
                                              "dense 1024 1024", "tanh"};
  const std::vector<std::string> disc_expected{"dense 1024 1024", "leakyrelu 0.2",
                                               "dense 1024 1", "sigmoid"};
  EXPECT_EQ(gan.generator.describe(), gen_expected);
  EXPECT_EQ(gan.discriminator.describe(), disc_expected);
  // 100*1024 + 1024 + 1024*1024 + 1024
  EXPECT_EQ(gan.generator.parameter_count(), 1153024u);
  EXPECT_EQ(gan.latent_dim, 100u);
  EXPECT_THROW(build_gan(4), std::invalid_argument);
}

TEST(BuildGan, GeneratorStaysInTanhRange) {
  GanPair gan = build_gan(32);
  const Tensor z({4, 100}, std::vector<double>(400, 0.0));
  const Tensor out = gan.generator.forward(z, false);
  for (double v : out.data) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(BuildGan, DiscriminatorOutputsProbability) {
  GanPair gan = build_gan(32);
  Rng rng(3);
  Tensor x({5, 32});
  for (double& v : x.data) v = rng.normal(0.0, 10.0);
  const Tensor score = gan.discriminator.forward(x, false);
  ASSERT_EQ(score.size(), 5u);
  for (double v : score.data) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(BuildDcgan, GeneratorLengthChain) {
  // Head lands on 32 channels x dim/16; four stride-2 stages double it back.
  EXPECT_EQ(ConvT1dLayer::output_length(64, 4, 2, 1), 128u);
  EXPECT_EQ(ConvT1dLayer::output_length(128, 4, 2, 1), 256u);
  EXPECT_EQ(ConvT1dLayer::output_length(256, 4, 2, 1), 512u);
  EXPECT_EQ(ConvT1dLayer::output_length(512, 4, 2, 1), 1024u);

  GanPair gan = build_dcgan(1024);
  const auto lines = gan.generator.describe();
  EXPECT_EQ(lines.front(), "dense 100 2048");
  EXPECT_EQ(lines[1], "reshape 32 64");
  std::size_t convt_count = 0;
  for (const std::string& line : lines) {
    if (line.rfind("convt1d", 0) == 0) ++convt_count;
  }
  EXPECT_EQ(convt_count, 4u);
  EXPECT_EQ(lines.back(), "tanh");

  const Tensor z({1, 100}, std::vector<double>(100, 0.1));
  const Tensor out = gan.generator.forward(z, true);
  EXPECT_EQ(out.shape, (std::vector<std::size_t>{1, 1, 1024}));
}

TEST(BuildDcgan, TestScaleUsesSmallHead) {
  GanPair gan = build_dcgan(16);
  EXPECT_EQ(gan.generator.describe().front(), "dense 100 32");
  const Tensor z({2, 100}, std::vector<double>(200, 0.05));
  const Tensor out = gan.generator.forward(z, true);
  EXPECT_EQ(out.shape, (std::vector<std::size_t>{2, 1, 16}));

  Rng rng(9);
  Tensor x({3, 1, 16});
  for (double& v : x.data) v = rng.normal();
  const Tensor score = gan.discriminator.forward(x, true);
  EXPECT_EQ(score.shape, (std::vector<std::size_t>{3, 1}));
}

TEST(BuildDcgan, RejectsIndivisibleDim) {
  EXPECT_THROW(build_dcgan(1000), std::invalid_argument);
  EXPECT_THROW(build_dcgan(0), std::invalid_argument);
}

TEST(TrainStep, LossesArePositiveAndParamsMove) {
  GanPair gan = build_gan(16);
  const LabeledDataset data = healthy_class(16, 21, 8);
  const AffineMap map = fit_minmax_map(data.spectra, -1.0, 1.0);
  Tensor real({data.size(), 16});
  for (std::size_t s = 0; s < data.size(); ++s) {
    const Spectrum norm = apply_map(data.spectra[s], map);
    for (std::size_t i = 0; i < 16; ++i) real.data[s * 16 + i] = norm[i];
  }

  const std::vector<double> gen_before = flat_params(gan.generator);
  const std::vector<double> disc_before = flat_params(gan.discriminator);
  Rng rng(77);
  const auto [d_loss, g_loss] = train_step(gan, real, rng);
  EXPECT_GT(d_loss, 0.0);
  EXPECT_GT(g_loss, 0.0);

  double gen_delta = 0.0, disc_delta = 0.0;
  const std::vector<double> gen_after = flat_params(gan.generator);
  const std::vector<double> disc_after = flat_params(gan.discriminator);
  for (std::size_t i = 0; i < gen_before.size(); ++i) {
    gen_delta += std::abs(gen_after[i] - gen_before[i]);
  }
  for (std::size_t i = 0; i < disc_before.size(); ++i) {
    disc_delta += std::abs(disc_after[i] - disc_before[i]);
  }
  EXPECT_GT(gen_delta, 0.0);
  EXPECT_GT(disc_delta, 0.0);
}

TEST(TrainStep, FrozenDiscriminatorGivesLnTwo) {
  GanPair gan = build_gan(16);
  zero_params(gan.discriminator);  // sigmoid(0) = 0.5 for every input
  gan.gen_adam.config.lr = 0.0;    // keep both networks frozen
  gan.disc_adam.config.lr = 0.0;

  Rng rng(5);
  Tensor real({4, 16});
  for (double& v : real.data) v = rng.uniform(-1.0, 1.0);
  const auto [d_loss, g_loss] = train_step(gan, real, rng);
  EXPECT_NEAR(g_loss, std::log(2.0), 1e-6);
  EXPECT_NEAR(d_loss, 2.0 * std::log(2.0), 1e-6);
}

TEST(Train, ValidatesConfigAndData) {
  GanPair gan = build_gan(16);
  const LabeledDataset data = healthy_class(16, 4, 6);

  TrainConfig config;
  config.epochs = 0;
  EXPECT_THROW(train(gan, data, config), std::invalid_argument);

  config.epochs = 1;
  config.batch_size = 0;
  EXPECT_THROW(train(gan, data, config), std::invalid_argument);

  PhantomConfig pc = default_phantom_config(16);
  pc.train_counts = {3, 3, 2};
  pc.test_counts = {1, 1, 1};
  const LabeledDataset mixed = generate_phantom(pc).first;
  config.batch_size = 2;
  EXPECT_THROW(train(gan, mixed, config), std::invalid_argument);
}

TEST(Train, DeepVariantDemandsFullBatch) {
  GanPair gan = build_dcgan(16);
  const LabeledDataset data = healthy_class(16, 4, 8);
  TrainConfig config;
  config.epochs = 1;
  config.batch_size = 7;
  EXPECT_THROW(train(gan, data, config), std::invalid_argument);

  config.batch_size.reset();  // full batch trains fine
  config.seed = 1;
  const TrainingReport report = train(gan, data, config);
  EXPECT_EQ(report.epochs_run, 1u);
}

TEST(Train, DeterministicForFixedSeed) {
  const LabeledDataset data = healthy_class(16, 31, 12);
  TrainConfig config;
  config.epochs = 3;
  config.batch_size = 4;
  config.seed = 99;

  GanPair a = build_gan(16);
  GanPair b = build_gan(16);
  init_params(a.generator, 11);
  init_params(a.discriminator, 12);
  init_params(b.generator, 11);
  init_params(b.discriminator, 12);

  const TrainingReport ra = train(a, data, config);
  const TrainingReport rb = train(b, data, config);
  EXPECT_EQ(flat_params(a.generator), flat_params(b.generator));
  EXPECT_EQ(flat_params(a.discriminator), flat_params(b.discriminator));
  EXPECT_EQ(ra.d_losses, rb.d_losses);
  EXPECT_EQ(ra.g_losses, rb.g_losses);
}

TEST(Generate, RawOutputsStayInTanhRange) {
  GanPair gan = build_gan(16);
  gan.grade = Grade::Low;
  const LabeledDataset out = generate(gan, 32, 7, AffineMap{1.0, 0.0});
  ASSERT_EQ(out.size(), 32u);
  for (const Spectrum& s : out.spectra) {
    for (double v : s.values) {
      EXPECT_GT(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
  for (Grade g : out.labels) EXPECT_EQ(g, Grade::Low);
}

TEST(Generate, DeterministicPerSeed) {
  GanPair gan = build_gan(16);
  const LabeledDataset a = generate(gan, 8, 123, AffineMap{2.0, 1.0});
  const LabeledDataset b = generate(gan, 8, 123, AffineMap{2.0, 1.0});
  EXPECT_EQ(a, b);
  const LabeledDataset c = generate(gan, 8, 124, AffineMap{2.0, 1.0});
  EXPECT_NE(a.spectra[0].values, c.spectra[0].values);
}

TEST(Train, DeskScaleRunBeatsUntrainedGenerator) {
  const LabeledDataset data = healthy_class(16, 42);
  const AffineMap map = fit_minmax_map(data.spectra, -1.0, 1.0);
  const Spectrum mean = class_mean(data, Grade::Healthy);

  GanPair gan = build_gan(16);
  init_params(gan.generator, 1001);
  init_params(gan.discriminator, 1002);
  gan.grade = Grade::Healthy;
  const LabeledDataset before = generate(gan, 64, 5, map);

  TrainConfig config;
  config.epochs = 150;
  config.batch_size = 16;
  config.seed = 7;
  train(gan, data, config);
  const LabeledDataset after = generate(gan, 64, 5, gan.denorm);

  const double mse_before = mse_to_mean(before, mean);
  const double mse_after = mse_to_mean(after, mean);
  EXPECT_LT(mse_after, mse_before);
}

TEST(GanIo, ManifestRoundTrip) {
  testutil::TempDir tmp;
  const LabeledDataset data = healthy_class(16, 8, 8);
  GanPair gan = build_gan(16);
  TrainConfig config;
  config.epochs = 2;
  config.batch_size = 4;
  config.seed = 3;
  train(gan, data, config);

  const std::string path = tmp.file("model.gan");
  save_gan(gan, path, 42);
  GanPair loaded = load_gan(path);
  EXPECT_EQ(loaded.variant, gan.variant);
  EXPECT_EQ(loaded.grade, gan.grade);
  EXPECT_EQ(loaded.latent_dim, gan.latent_dim);
  EXPECT_EQ(loaded.dim, gan.dim);
  EXPECT_DOUBLE_EQ(loaded.denorm.scale, gan.denorm.scale);
  EXPECT_DOUBLE_EQ(loaded.denorm.offset, gan.denorm.offset);

  const LabeledDataset a = generate(gan, 4, 55, gan.denorm);
  const LabeledDataset b = generate(loaded, 4, 55, loaded.denorm);
  EXPECT_EQ(a, b);
}
