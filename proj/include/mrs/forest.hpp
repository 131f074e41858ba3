#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrs/rng.hpp"
#include "mrs/spectrum.hpp"
#include "mrs/text.hpp"

namespace mrs {

/// 1 - sum_g p_g^2 over the grade proportions.
inline double gini(const std::vector<Grade>& labels) {
  if (labels.empty()) throw std::invalid_argument("gini: empty label set");
  std::array<std::size_t, kGradeCount> counts{};
  for (Grade g : labels) ++counts[grade_index(g)];
  const double n = static_cast<double>(labels.size());
  double sum = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / n;
    sum += p * p;
  }
  return 1.0 - sum;
}

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

namespace detail {

inline double gini_of_counts(const std::array<std::size_t, kGradeCount>& counts,
                             std::size_t n) {
  double sum = 0.0;
  const double dn = static_cast<double>(n);
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / dn;
    sum += p * p;
  }
  return 1.0 - sum;
}

}  // namespace detail

/// Best threshold over the given features, taken at midpoints between
/// consecutive distinct sorted values. Maximizes the weighted Gini decrease;
/// ties break toward the lower feature index, then the lower threshold.
/// Returns nothing when no split strictly decreases impurity.
inline std::optional<Split> best_split(const LabeledDataset& data,
                                       const std::vector<std::size_t>& samples,
                                       const std::vector<std::size_t>& feature_subset) {
  const std::size_t n = samples.size();
  if (n < 2) return std::nullopt;

  std::array<std::size_t, kGradeCount> total_counts{};
  for (std::size_t s : samples) ++total_counts[grade_index(data.labels[s])];
  const double parent_gini = detail::gini_of_counts(total_counts, n);
  if (parent_gini == 0.0) return std::nullopt;

  std::vector<std::size_t> features = feature_subset;
  std::sort(features.begin(), features.end());

  std::optional<Split> best;
  std::vector<std::pair<double, Grade>> column(n);
  for (std::size_t f : features) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = {data.spectra[samples[i]][f], data.labels[samples[i]]};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::array<std::size_t, kGradeCount> left{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[grade_index(column[i].second)];
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      std::array<std::size_t, kGradeCount> right{};
      for (std::size_t g = 0; g < kGradeCount; ++g) {
        right[g] = total_counts[g] - left[g];
      }
      const double weighted =
          (static_cast<double>(nl) * detail::gini_of_counts(left, nl) +
           static_cast<double>(nr) * detail::gini_of_counts(right, nr)) /
          static_cast<double>(n);
      const double decrease = parent_gini - weighted;
      if (decrease > 0.0 &&
          (!best || decrease > best->impurity_decrease)) {
        best = Split{f, 0.5 * (column[i].first + column[i + 1].first), decrease};
      }
    }
  }
  return best;
}

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Grade grade = Grade::Healthy;                 // leaf majority vote
  std::array<std::uint64_t, kGradeCount> counts{};  // leaf training histogram
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  Grade predict(const Spectrum& x) const {
    std::size_t node = 0;
    while (nodes[node].feature >= 0) {
      const TreeNode& n = nodes[node];
      node = x[static_cast<std::size_t>(n.feature)] < n.threshold
                 ? static_cast<std::size_t>(n.left)
                 : static_cast<std::size_t>(n.right);
    }
    return nodes[node].grade;
  }
};

struct Forest {
  std::vector<DecisionTree> trees;
  std::size_t dim = 0;
  std::size_t n_features_per_split = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline Grade majority_grade(const std::array<std::uint64_t, kGradeCount>& counts) {
  std::size_t best = 0;
  for (std::size_t g = 1; g < kGradeCount; ++g) {
    if (counts[g] > counts[best]) best = g;  // ties keep the lower grade
  }
  return kAllGrades[best];
}

struct TreeBuilder {
  const LabeledDataset& data;
  std::size_t max_depth;  // 0 = unlimited
  std::size_t n_features;
  Rng& rng;
  DecisionTree tree;

  int build(std::vector<std::size_t>& samples, std::size_t depth) {
    std::array<std::uint64_t, kGradeCount> counts{};
    for (std::size_t s : samples) ++counts[grade_index(data.labels[s])];

    bool pure = false;
    for (std::size_t g = 0; g < kGradeCount; ++g) {
      if (counts[g] == samples.size()) pure = true;
    }
    const bool depth_capped = max_depth > 0 && depth >= max_depth;

    std::optional<Split> split;
    if (!pure && !depth_capped && samples.size() >= 2) {
      std::vector<std::size_t> features(data.dim());
      for (std::size_t f = 0; f < features.size(); ++f) features[f] = f;
      for (std::size_t i = 0; i < n_features; ++i) {
        std::swap(features[i], features[i + rng.uniform_index(features.size() - i)]);
      }
      features.resize(n_features);
      split = best_split(data, samples, features);
    }

    if (!split) {
      TreeNode leaf;
      leaf.grade = majority_grade(counts);
      leaf.counts = counts;
      tree.nodes.push_back(leaf);
      return static_cast<int>(tree.nodes.size() - 1);
    }

    std::vector<std::size_t> left_samples, right_samples;
    for (std::size_t s : samples) {
      if (data.spectra[s][split->feature] < split->threshold) {
        left_samples.push_back(s);
      } else {
        right_samples.push_back(s);
      }
    }
    samples.clear();
    samples.shrink_to_fit();

    const int index = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    tree.nodes.push_back(node);
    tree.nodes[index].left = build(left_samples, depth + 1);
    tree.nodes[index].right = build(right_samples, depth + 1);
    return index;
  }
};

}  // namespace detail

/// Bagged forest: each tree fits a seeded bootstrap resample with per-node
/// random feature subsets. n_features_per_split == 0 selects ceil(sqrt(dim)).
/// Deterministic per seed.
inline Forest fit_forest(const LabeledDataset& train, std::size_t n_trees,
                         std::size_t max_depth, std::size_t n_features_per_split,
                         std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("fit_forest: empty training set");
  if (n_trees < 1) throw std::invalid_argument("fit_forest: need at least one tree");

  std::array<std::size_t, kGradeCount> counts{};
  for (Grade g : train.labels) ++counts[grade_index(g)];
  std::size_t grades_present = 0;
  for (std::size_t c : counts) grades_present += (c > 0);
  if (grades_present < 2) {
    throw std::invalid_argument("fit_forest: training set holds a single grade");
  }

  const std::size_t dim = train.dim();
  std::size_t n_features = n_features_per_split;
  if (n_features == 0) {
    n_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
  }
  if (n_features > dim) {
    throw std::invalid_argument("fit_forest: n_features_per_split exceeds dim");
  }

  Forest forest;
  forest.dim = dim;
  forest.n_features_per_split = n_features;
  forest.seed = seed;
  forest.trees.reserve(n_trees);

  const std::size_t n = train.size();
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> bootstrap(n);
    for (std::size_t i = 0; i < n; ++i) bootstrap[i] = rng.uniform_index(n);
    detail::TreeBuilder builder{train, max_depth, n_features, rng, {}};
    builder.build(bootstrap, 0);
    forest.trees.push_back(std::move(builder.tree));
  }
  return forest;
}

/// Majority vote across trees; ties resolve to the lowest grade in
/// Healthy < Low < High order.
inline Grade predict(const Forest& forest, const Spectrum& x) {
  if (x.dim() != forest.dim) {
    throw std::invalid_argument("predict: expected dim " +
                                std::to_string(forest.dim) + ", got " +
                                std::to_string(x.dim()));
  }
  std::array<std::size_t, kGradeCount> votes{};
  for (const DecisionTree& tree : forest.trees) {
    ++votes[grade_index(tree.predict(x))];
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < kGradeCount; ++g) {
    if (votes[g] > votes[best]) best = g;
  }
  return kAllGrades[best];
}

struct AccuracyReport {
  double overall = 0.0;
  std::map<Grade, double> per_grade;  // grades present in the test set
};

inline AccuracyReport accuracy(const Forest& forest, const LabeledDataset& test) {
  if (test.empty()) throw std::invalid_argument("accuracy: empty test set");
  std::array<std::size_t, kGradeCount> total{}, correct{};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Grade truth = test.labels[i];
    const Grade guess = predict(forest, test.spectra[i]);
    ++total[grade_index(truth)];
    if (guess == truth) {
      ++correct[grade_index(truth)];
      ++hits;
    }
  }
  AccuracyReport report;
  report.overall = static_cast<double>(hits) / static_cast<double>(test.size());
  for (Grade g : kAllGrades) {
    if (total[grade_index(g)] > 0) {
      report.per_grade[g] = static_cast<double>(correct[grade_index(g)]) /
                            static_cast<double>(total[grade_index(g)]);
    }
  }
  return report;
}

// --- SFRF1 text format ------------------------------------------------------
// Header: magic line, then "n_trees dim n_features_per_split seed". Each tree
// starts with "tree <n_nodes>" followed by one line per node in preorder:
// internal "n <feature> <threshold>", leaf "l <grade> <c0> <c1> <c2>".

inline constexpr const char* kForestMagic = "SFRF1";

namespace detail {

inline void write_tree_node(std::string& out, const DecisionTree& tree, int index) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
  if (node.feature < 0) {
    out += "l ";
    out += grade_name(node.grade);
    for (std::uint64_t c : node.counts) {
      out += ' ';
      out += std::to_string(c);
    }
    out += '\n';
    return;
  }
  out += "n ";
  out += std::to_string(node.feature);
  out += ' ';
  out += format_double(node.threshold);
  out += '\n';
  write_tree_node(out, tree, node.left);
  write_tree_node(out, tree, node.right);
}

inline int read_tree_node(DecisionTree& tree,
                          const std::vector<std::string_view>& lines,
                          std::size_t& cursor) {
  if (cursor >= lines.size()) throw std::runtime_error("forest: truncated tree");
  const auto fields = split(lines[cursor], ' ');
  ++cursor;
  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (fields.size() == 2 + kGradeCount && fields[0] == "l") {
    TreeNode& node = tree.nodes.back();
    node.grade = parse_grade(fields[1]);
    for (std::size_t g = 0; g < kGradeCount; ++g) {
      node.counts[g] = parse_u64(fields[2 + g]);
    }
    return index;
  }
  if (fields.size() == 3 && fields[0] == "n") {
    tree.nodes[static_cast<std::size_t>(index)].feature =
        static_cast<int>(parse_int(fields[1]));
    tree.nodes[static_cast<std::size_t>(index)].threshold = parse_double(fields[2]);
    const int left = read_tree_node(tree, lines, cursor);
    const int right = read_tree_node(tree, lines, cursor);
    tree.nodes[static_cast<std::size_t>(index)].left = left;
    tree.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }
  throw std::runtime_error("forest: bad node line '" + std::string(lines[cursor - 1]) + "'");
}

}  // namespace detail

inline std::string forest_to_text(const Forest& forest) {
  std::string out;
  out += kForestMagic;
  out += '\n';
  out += std::to_string(forest.trees.size());
  out += ' ';
  out += std::to_string(forest.dim);
  out += ' ';
  out += std::to_string(forest.n_features_per_split);
  out += ' ';
  out += std::to_string(forest.seed);
  out += '\n';
  for (const DecisionTree& tree : forest.trees) {
    out += "tree ";
    out += std::to_string(tree.nodes.size());
    out += '\n';
    detail::write_tree_node(out, tree, 0);
  }
  return out;
}

inline Forest forest_from_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(trim(line));
  }
  if (lines.size() < 2 || lines[0] != kForestMagic) {
    throw std::runtime_error("forest: bad magic, expected SFRF1");
  }
  const auto header = split(lines[1], ' ');
  if (header.size() != 4) throw std::runtime_error("forest: bad header");
  Forest forest;
  const std::size_t n_trees = static_cast<std::size_t>(parse_int(header[0]));
  forest.dim = static_cast<std::size_t>(parse_int(header[1]));
  forest.n_features_per_split = static_cast<std::size_t>(parse_int(header[2]));
  forest.seed = parse_u64(header[3]);

  std::size_t cursor = 2;
  for (std::size_t t = 0; t < n_trees; ++t) {
    if (cursor >= lines.size()) throw std::runtime_error("forest: missing tree");
    const auto head = split(lines[cursor], ' ');
    if (head.size() != 2 || head[0] != "tree") {
      throw std::runtime_error("forest: bad tree header '" +
                               std::string(lines[cursor]) + "'");
    }
    const std::size_t n_nodes = static_cast<std::size_t>(parse_int(head[1]));
    ++cursor;
    DecisionTree tree;
    tree.nodes.reserve(n_nodes);
    detail::read_tree_node(tree, lines, cursor);
    if (tree.nodes.size() != n_nodes) {
      throw std::runtime_error("forest: node count mismatch");
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

inline void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << forest_to_text(forest);
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline Forest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return forest_from_text(buf.str());
}

}  // namespace mrs
