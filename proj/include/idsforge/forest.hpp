#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "idsforge/tree.hpp"

namespace idsforge {

enum class ForestKind { random_forest, forest_pa };

/// Penalty weights of Forest-PA, one per attribute.
///
/// After each tree, attributes tested in it are redrawn inside the weight range
/// of their level, and every other attribute drifts back towards 1 by its
/// increment. Weights stay in (0, 1].
class AttributeWeights {
 public:
  explicit AttributeWeights(std::size_t n_features, double rho = 1e-4);

  std::span<const double> weights() const { return weights_; }
  std::span<const std::size_t> last_level() const { return last_level_; }
  std::span<const double> increments() const { return increments_; }
  double rho() const { return rho_; }

  void update(const DecisionTree& latest, Rng& rng);

 private:
  std::vector<double> weights_;
  std::vector<std::size_t> last_level_;  // 0 = never tested
  std::vector<double> increments_;
  double rho_;
};

/// Weight range for an attribute tested at `level` (root = 1).
/// Level 1 gives [0, e^-1]; deeper levels give [e^(-1/(level-1)) + rho, e^(-1/level)].
std::pair<double, double> weight_range(std::size_t level, double rho);

/// Increment restoring an untested attribute's weight:
/// (1 - weight) / ((tree_height + 1) - level). The divisor is floored at 1.
double weight_increment(double weight, std::size_t tree_height, std::size_t level);

class Forest final : public Classifier {
 public:
  Forest(std::vector<DecisionTree> trees, ForestKind kind, std::vector<std::uint64_t> bootstrap_seeds,
         std::optional<double> oob_error, std::size_t subspace_size,
         std::optional<AttributeWeights> final_weights = std::nullopt);

  std::size_t n_features() const override { return trees_.front().n_features(); }
  std::size_t n_classes() const override { return trees_.front().n_classes(); }
  /// Mean of the member trees' leaf distributions.
  ClassDistribution predict(std::span<const double> row) const override;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  ForestKind kind() const { return kind_; }
  const std::vector<std::uint64_t>& bootstrap_seeds() const { return bootstrap_seeds_; }
  std::optional<double> oob_error() const { return oob_error_; }
  std::size_t subspace_size() const { return subspace_size_; }
  const std::optional<AttributeWeights>& final_weights() const { return final_weights_; }

 private:
  std::vector<DecisionTree> trees_;
  ForestKind kind_;
  std::vector<std::uint64_t> bootstrap_seeds_;
  std::optional<double> oob_error_;
  std::size_t subspace_size_;
  std::optional<AttributeWeights> final_weights_;
};

/// Row positions drawn with replacement; positions index into the caller's row list.
std::vector<std::size_t> bootstrap_positions(std::size_t n, std::uint64_t seed);

/// Seeds used for tree t of a forest grown with `seed`.
std::uint64_t bootstrap_seed(std::uint64_t seed, std::size_t tree);
std::uint64_t subspace_seed(std::uint64_t seed, std::size_t tree);
std::uint64_t weight_seed(std::uint64_t seed);

std::size_t default_subspace_size(std::size_t n_features);

/// Random forest: each tree is grown on its own bootstrap sample and picks
/// among ceil(sqrt(d)) fresh random features at every node. Trees are built in
/// parallel; results do not depend on the thread count.
Forest rf_fit(const Dataset& ds, std::span<const std::size_t> rows, std::size_t n_trees, const TreeParams& params,
              std::uint64_t seed);

/// Forest-PA: bootstrap trees over all features with weight-scaled gain ratio;
/// weights are updated after every tree, so trees are grown in sequence.
Forest forest_pa_fit(const Dataset& ds, std::span<const std::size_t> rows, std::size_t n_trees,
                     const TreeParams& params, double rho, std::uint64_t seed);

}  // namespace idsforge
