#include <gtest/gtest.h>

#include <cmath>

#include "mrs/forest.hpp"
#include "mrs/phantom.hpp"
#include "test_util.hpp"

using namespace mrs;

namespace {

LabeledDataset one_feature_dataset(const std::vector<double>& values,
                                   const std::vector<Grade>& labels) {
  LabeledDataset ds;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ds.push_back(Spectrum({values[i]}), labels[i]);
  }
  return ds;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

// Exhaustive split oracle for one feature: every midpoint, recomputed Gini.
std::pair<double, double> exhaustive_best_split(const std::vector<double>& values,
                                                const std::vector<Grade>& labels) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order = all_indices(n);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double best_threshold = 0.0, best_decrease = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (values[order[i]] == values[order[i + 1]]) continue;
    const double threshold = 0.5 * (values[order[i]] + values[order[i + 1]]);
    std::vector<Grade> left, right;
    for (std::size_t j = 0; j < n; ++j) {
      (values[j] < threshold ? left : right).push_back(labels[j]);
    }
    const double weighted =
        (static_cast<double>(left.size()) * gini(left) +
         static_cast<double>(right.size()) * gini(right)) /
        static_cast<double>(n);
    const double decrease = gini(labels) - weighted;
    if (decrease > best_decrease) {
      best_decrease = decrease;
      best_threshold = threshold;
    }
  }
  return {best_threshold, best_decrease};
}

}  // namespace

TEST(Gini, AnalyticValues) {
  EXPECT_DOUBLE_EQ(gini({Grade::Low, Grade::Low, Grade::Low}), 0.0);
  EXPECT_DOUBLE_EQ(gini({Grade::Healthy, Grade::Healthy, Grade::High, Grade::High}),
                   0.5);
  EXPECT_NEAR(gini({Grade::Healthy, Grade::Low, Grade::High}), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(gini({}), std::invalid_argument);
}

TEST(Gini, BoundedForThreeClasses) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Grade> labels;
    const std::size_t n = 1 + rng.uniform_index(20);
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(kAllGrades[rng.uniform_index(3)]);
    }
    const double g = gini(labels);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0 - 1.0 / 3.0 + 1e-15);
  }
}

TEST(BestSplit, MatchesExhaustiveOracle) {
  const std::vector<double> values{1.0, 2.0, 9.0, 10.0};
  const std::vector<Grade> labels{Grade::Healthy, Grade::Healthy, Grade::High,
                                  Grade::High};
  const LabeledDataset ds = one_feature_dataset(values, labels);
  const auto split = best_split(ds, all_indices(4), {0});
  ASSERT_TRUE(split.has_value());
  const auto [oracle_threshold, oracle_decrease] =
      exhaustive_best_split(values, labels);
  EXPECT_DOUBLE_EQ(split->threshold, oracle_threshold);
  EXPECT_DOUBLE_EQ(split->impurity_decrease, oracle_decrease);
  EXPECT_DOUBLE_EQ(split->threshold, 5.5);
  EXPECT_DOUBLE_EQ(split->impurity_decrease, 0.5);
  EXPECT_EQ(split->feature, 0u);
}

TEST(BestSplit, PureNodeHasNoSplit) {
  const LabeledDataset ds = one_feature_dataset(
      {1.0, 2.0, 3.0}, {Grade::Low, Grade::Low, Grade::Low});
  EXPECT_FALSE(best_split(ds, all_indices(3), {0}).has_value());
}

TEST(BestSplit, IdenticalSamplesUnsplittable) {
  const LabeledDataset ds =
      one_feature_dataset({4.0, 4.0}, {Grade::Low, Grade::High});
  EXPECT_FALSE(best_split(ds, all_indices(2), {0}).has_value());
}

TEST(BestSplit, WeightedChildImpurityNeverExceedsParent) {
  const LabeledDataset ds = testutil::random_dataset(40, 6, 17);
  const auto split = best_split(ds, all_indices(40), {0, 1, 2, 3, 4, 5});
  ASSERT_TRUE(split.has_value());
  EXPECT_GT(split->impurity_decrease, 0.0);

  std::vector<Grade> left, right;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.spectra[i][split->feature] < split->threshold ? left : right)
        .push_back(ds.labels[i]);
  }
  std::vector<Grade> all_labels = ds.labels;
  const double weighted =
      (static_cast<double>(left.size()) * gini(left) +
       static_cast<double>(right.size()) * gini(right)) /
      static_cast<double>(ds.size());
  EXPECT_LE(weighted, gini(all_labels));
  EXPECT_NEAR(gini(all_labels) - weighted, split->impurity_decrease, 1e-12);
}

TEST(BestSplit, TieBreaksTowardLowerFeature) {
  // Feature 1 duplicates feature 0: identical best decrease on both.
  LabeledDataset ds;
  ds.push_back(Spectrum({1.0, 1.0}), Grade::Healthy);
  ds.push_back(Spectrum({2.0, 2.0}), Grade::Healthy);
  ds.push_back(Spectrum({9.0, 9.0}), Grade::High);
  const auto split = best_split(ds, all_indices(3), {1, 0});
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->feature, 0u);
}

TEST(FitForest, SingleDeepTreeMemorizesTrainingData) {
  // Grade regions are disjoint clusters, so a full-depth tree splits them
  // exactly and even rows the bootstrap skipped land on the right side.
  Rng rng(2024);
  LabeledDataset ds;
  const double centers[3] = {0.0, 20.0, 40.0};
  for (std::size_t g = 0; g < 3; ++g) {
    for (std::size_t i = 0; i < 10; ++i) {
      std::vector<double> row(4);
      for (double& v : row) v = centers[g] + rng.normal(0.0, 1.0);
      ds.push_back(Spectrum(std::move(row)), kAllGrades[g]);
    }
  }
  const Forest forest = fit_forest(ds, 1, 0, 4, 5);
  const AccuracyReport report = accuracy(forest, ds);
  EXPECT_DOUBLE_EQ(report.overall, 1.0);
  for (Grade g : kAllGrades) EXPECT_DOUBLE_EQ(report.per_grade.at(g), 1.0);
}

TEST(FitForest, DeterministicPerSeed) {
  const LabeledDataset ds = testutil::random_dataset(30, 10, 3);
  const Forest a = fit_forest(ds, 12, 4, 3, 99);
  const Forest b = fit_forest(ds, 12, 4, 3, 99);
  ASSERT_EQ(a.trees.size(), b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    ASSERT_EQ(a.trees[t].nodes.size(), b.trees[t].nodes.size());
    for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
      EXPECT_EQ(a.trees[t].nodes[n].feature, b.trees[t].nodes[n].feature);
      EXPECT_EQ(a.trees[t].nodes[n].threshold, b.trees[t].nodes[n].threshold);
      EXPECT_EQ(a.trees[t].nodes[n].grade, b.trees[t].nodes[n].grade);
    }
  }
  EXPECT_EQ(forest_to_text(a), forest_to_text(b));
}

TEST(FitForest, RejectsSingleGradeTraining) {
  LabeledDataset ds;
  ds.push_back(Spectrum({1.0, 2.0}), Grade::Low);
  ds.push_back(Spectrum({3.0, 4.0}), Grade::Low);
  EXPECT_THROW(fit_forest(ds, 5, 4, 2, 1), std::invalid_argument);
}

TEST(FitForest, SeparablePhantomGeneralizes) {
  // Two grades with disjoint peak supports; defaults n_trees=100, depth=4.
  PhantomConfig config = default_phantom_config(32);
  config.peaks[grade_index(Grade::Healthy)] = {{8.0, 1.0, 1.0}};
  config.peaks[grade_index(Grade::High)] = {{24.0, 1.0, 1.0}};
  config.train_counts = {40, 2, 40};
  config.test_counts = {20, 1, 20};
  config.seed = 11;
  const auto [train_split, test_split] = generate_phantom(config);

  LabeledDataset train2, test2;
  for (std::size_t i = 0; i < train_split.size(); ++i) {
    if (train_split.labels[i] != Grade::Low) {
      train2.push_back(train_split.spectra[i], train_split.labels[i]);
    }
  }
  for (std::size_t i = 0; i < test_split.size(); ++i) {
    if (test_split.labels[i] != Grade::Low) {
      test2.push_back(test_split.spectra[i], test_split.labels[i]);
    }
  }

  const Forest forest = fit_forest(train2, 100, 4, 0, 42);
  const AccuracyReport report = accuracy(forest, test2);
  EXPECT_GE(report.overall, 0.95);
}

TEST(Predict, MemorizingTreeReturnsTrainingLabel) {
  LabeledDataset ds;
  ds.push_back(Spectrum({0.0, 0.0}), Grade::Healthy);
  ds.push_back(Spectrum({1.0, 5.0}), Grade::Low);
  ds.push_back(Spectrum({9.0, 2.0}), Grade::High);

  // A forest of one unlimited-depth tree over all features; bootstrap may
  // repeat rows but distinct feature values keep leaves pure.
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Forest forest = fit_forest(ds, 1, 0, 2, seed);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const Grade p = predict(forest, ds.spectra[i]);
      // Bootstrap may omit a row entirely; when present it must be exact.
      const DecisionTree& tree = forest.trees[0];
      std::uint64_t seen = 0;
      for (const TreeNode& node : tree.nodes) {
        if (node.feature < 0) seen += node.counts[grade_index(ds.labels[i])];
      }
      if (seen > 0) EXPECT_EQ(p, ds.labels[i]) << "sample " << i;
    }
  }
}

TEST(Predict, MajorityAndTieBreak) {
  // Hand-built trees: leaves only.
  const auto leaf_tree = [](Grade g) {
    DecisionTree tree;
    TreeNode node;
    node.grade = g;
    node.counts[grade_index(g)] = 1;
    tree.nodes.push_back(node);
    return tree;
  };
  Forest forest;
  forest.dim = 2;
  forest.n_features_per_split = 1;
  forest.trees = {leaf_tree(Grade::Healthy), leaf_tree(Grade::High),
                  leaf_tree(Grade::High)};
  EXPECT_EQ(predict(forest, Spectrum({0.0, 0.0})), Grade::High);

  forest.trees = {leaf_tree(Grade::Low), leaf_tree(Grade::High)};
  EXPECT_EQ(predict(forest, Spectrum({0.0, 0.0})), Grade::Low);  // tie -> lower

  EXPECT_THROW(predict(forest, Spectrum({0.0, 0.0, 0.0})), std::invalid_argument);
}

TEST(Predict, InvariantToTreeOrder) {
  const LabeledDataset ds = testutil::random_dataset(30, 6, 8);
  Forest forest = fit_forest(ds, 15, 3, 2, 4);
  Forest reversed = forest;
  std::reverse(reversed.trees.begin(), reversed.trees.end());
  const LabeledDataset probes = testutil::random_dataset(20, 6, 9);
  for (const Spectrum& s : probes.spectra) {
    EXPECT_EQ(predict(forest, s), predict(reversed, s));
  }
}

TEST(Accuracy, CountsMatchIndependentPass) {
  const LabeledDataset train = testutil::random_dataset(30, 5, 44);
  const LabeledDataset test = testutil::random_dataset(21, 5, 45);
  const Forest forest = fit_forest(train, 10, 3, 2, 7);
  const AccuracyReport report = accuracy(forest, test);

  std::map<Grade, std::pair<std::size_t, std::size_t>> tally;  // correct, total
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Grade p = predict(forest, test.spectra[i]);
    auto& [c, t] = tally[test.labels[i]];
    ++t;
    if (p == test.labels[i]) {
      ++c;
      ++correct;
    }
  }
  EXPECT_DOUBLE_EQ(report.overall,
                   static_cast<double>(correct) / static_cast<double>(test.size()));
  for (const auto& [grade, ct] : tally) {
    ASSERT_TRUE(report.per_grade.count(grade));
    EXPECT_DOUBLE_EQ(report.per_grade.at(grade),
                     static_cast<double>(ct.first) / static_cast<double>(ct.second));
  }
}

TEST(Accuracy, PerfectAndPartial) {
  LabeledDataset ds;
  ds.push_back(Spectrum({0.0}), Grade::Healthy);
  ds.push_back(Spectrum({1.0}), Grade::Healthy);
  ds.push_back(Spectrum({10.0}), Grade::High);
  ds.push_back(Spectrum({11.0}), Grade::High);
  const Forest forest = fit_forest(ds, 1, 0, 1, 3);
  const AccuracyReport report = accuracy(forest, ds);
  EXPECT_DOUBLE_EQ(report.overall, 1.0);
  EXPECT_DOUBLE_EQ(report.per_grade.at(Grade::Healthy), 1.0);

  // 3-of-4 correct.
  LabeledDataset skewed = ds;
  skewed.labels[3] = Grade::Low;
  const AccuracyReport partial = accuracy(forest, skewed);
  EXPECT_DOUBLE_EQ(partial.overall, 0.75);
}

TEST(ForestIo, RoundTripIsByteIdentical) {
  const LabeledDataset ds = testutil::random_dataset(25, 6, 73);
  const Forest forest = fit_forest(ds, 8, 4, 3, 21);
  const std::string text = forest_to_text(forest);
  const Forest back = forest_from_text(text);
  EXPECT_EQ(forest_to_text(back), text);
  EXPECT_EQ(back.trees.size(), forest.trees.size());
  EXPECT_EQ(back.dim, forest.dim);
  EXPECT_EQ(back.n_features_per_split, forest.n_features_per_split);
  EXPECT_EQ(back.seed, forest.seed);

  // Same predictions after the round trip.
  const LabeledDataset probes = testutil::random_dataset(15, 6, 74);
  for (const Spectrum& s : probes.spectra) {
    EXPECT_EQ(predict(back, s), predict(forest, s));
  }

  testutil::TempDir tmp;
  save_forest(forest, tmp.file("f.rf"));
  EXPECT_EQ(testutil::read_file(tmp.file("f.rf")), text);
  const Forest loaded = load_forest(tmp.file("f.rf"));
  EXPECT_EQ(forest_to_text(loaded), text);
}

TEST(ForestIo, RejectsCorruptInput) {
  EXPECT_THROW(forest_from_text("WRONG\n1 2 3 4\n"), std::runtime_error);
  EXPECT_THROW(forest_from_text("SFRF1\n1 2 3 4\ntree 1\n"), std::runtime_error);
}
