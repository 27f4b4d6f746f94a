#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idsforge/dataset.hpp"

namespace idsforge {

class Rng;

/// Class-probability vector: entries in [0,1] summing to 1 within 1e-9.
struct ClassDistribution {
  std::vector<double> probs;

  ClassDistribution() = default;
  explicit ClassDistribution(std::vector<double> p);

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
  /// Lowest index among the maxima.
  ClassIndex argmax() const;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

/// Common contract of every trained model.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::size_t n_features() const = 0;
  virtual std::size_t n_classes() const = 0;
  /// Throws InputError when row.size() != n_features().
  virtual ClassDistribution predict(std::span<const double> row) const = 0;
};

struct TreeParams {
  std::size_t min_leaf = 2;
  std::optional<std::size_t> max_depth;
  double min_gain = 1e-6;
};

/// Flat node array; node 0 is the root. Leaves have feature == -1.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;  // rows with value <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t depth = 0;
  std::uint32_t n_train = 0;
  ClassDistribution distribution;  // leaves only

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree final : public Classifier {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features, std::size_t n_classes, TreeParams params);

  std::size_t n_features() const override { return n_features_; }
  std::size_t n_classes() const override { return n_classes_; }
  ClassDistribution predict(std::span<const double> row) const override;

  /// Index of the leaf reached by `row`.
  std::size_t leaf_index(std::span<const double> row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }

  /// Number of levels, counting the root as level 1.
  std::size_t height() const;

  /// For each feature, the shallowest level (root = 1) at which it is tested; 0 if untested.
  std::vector<std::size_t> tested_levels() const;

  friend bool operator==(const DecisionTree& a, const DecisionTree& b);

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_;
  std::size_t n_classes_;
  TreeParams params_;
};

bool operator==(const TreeNode& a, const TreeNode& b);

/// Random restriction of the candidate features at every node.
struct SubspaceSampling {
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

/// Grows a binary gain-ratio tree on `rows` (which may repeat, as in a bootstrap).
///
/// Each node takes the (feature, threshold) split with the highest gain ratio,
/// multiplied by `weights[feature]` when weights are given. Growth stops on a
/// pure node, when fewer than 2·min_leaf rows remain, at max_depth, or when the
/// best score is at most min_gain. Leaves hold Laplace-smoothed frequencies
/// (count + 1) / (n + c).
DecisionTree c45_fit(const Dataset& ds, std::span<const std::size_t> rows, const TreeParams& params,
                     std::span<const double> weights = {},
                     const std::optional<SubspaceSampling>& subspace = std::nullopt);

}  // namespace idsforge
