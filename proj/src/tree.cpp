#include "idsforge/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idsforge/error.hpp"
#include "idsforge/kernels.hpp"
#include "idsforge/rng.hpp"

namespace idsforge {

ClassDistribution::ClassDistribution(std::vector<double> p) : probs(std::move(p)) {
  if (probs.empty()) throw InvariantError("class distribution is empty");
  double sum = 0.0;
  for (double v : probs) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("class probability outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvariantError("class probabilities do not sum to 1");
}

ClassIndex ClassDistribution::argmax() const {
  return static_cast<ClassIndex>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.left == b.left && a.right == b.right &&
         a.depth == b.depth && a.n_train == b.n_train && a.distribution == b.distribution;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  return a.n_features_ == b.n_features_ && a.n_classes_ == b.n_classes_ && a.nodes_ == b.nodes_;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features, std::size_t n_classes,
                           TreeParams params)
    : nodes_(std::move(nodes)), n_features_(n_features), n_classes_(n_classes), params_(params) {
  if (nodes_.empty()) throw InvariantError("tree has no nodes");
  if (params_.min_leaf < 1) throw InputError("min_leaf must be at least 1");
  const auto count = static_cast<std::int32_t>(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.is_leaf()) {
      if (node.distribution.size() != n_classes_) throw InvariantError("leaf distribution has the wrong width");
    } else {
      if (static_cast<std::size_t>(node.feature) >= n_features_) throw InvariantError("split feature out of range");
      // Children always follow their parent in the array, so traversal terminates.
      if (node.left <= static_cast<std::int32_t>(i) || node.right <= static_cast<std::int32_t>(i) ||
          node.left >= count || node.right >= count) {
        throw InvariantError("internal node child index out of order");
      }
    }
  }
}

std::size_t DecisionTree::leaf_index(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw InputError("row has " + std::to_string(row.size()) + " features, model expects " +
                     std::to_string(n_features_));
  }
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const auto& node = nodes_[at];
    at = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                 : node.right);
  }
  return at;
}

ClassDistribution DecisionTree::predict(std::span<const double> row) const {
  return nodes_[leaf_index(row)].distribution;
}

std::size_t DecisionTree::height() const {
  std::uint32_t deepest = 0;
  for (const auto& n : nodes_) deepest = std::max(deepest, n.depth);
  return static_cast<std::size_t>(deepest) + 1;
}

std::vector<std::size_t> DecisionTree::tested_levels() const {
  std::vector<std::size_t> levels(n_features_, 0);
  for (const auto& n : nodes_) {
    if (n.is_leaf()) continue;
    auto& lvl = levels[static_cast<std::size_t>(n.feature)];
    const std::size_t here = n.depth + 1;
    if (lvl == 0 || here < lvl) lvl = here;
  }
  return levels;
}

namespace {

struct Pending {
  std::size_t node;
  std::vector<std::size_t> rows;
};

ClassDistribution laplace(std::span<const std::size_t> counts, std::size_t n) {
  std::vector<double> p(counts.size());
  const double denom = static_cast<double>(n + counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) p[c] = static_cast<double>(counts[c] + 1) / denom;
  return ClassDistribution(std::move(p));
}

}  // namespace

DecisionTree c45_fit(const Dataset& ds, std::span<const std::size_t> rows, const TreeParams& params,
                     std::span<const double> weights, const std::optional<SubspaceSampling>& subspace) {
  if (rows.empty()) throw InputError("cannot fit a tree on zero rows");
  if (params.min_leaf < 1) throw InputError("min_leaf must be at least 1");
  if (!weights.empty() && weights.size() != ds.n_features()) throw InputError("weight vector width mismatch");
  const std::size_t d = ds.n_features();
  const std::size_t c = ds.n_classes();

  std::optional<Rng> rng;
  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});
  if (subspace) rng.emplace(subspace->seed);

  std::vector<TreeNode> nodes(1);
  std::vector<Pending> stack;
  stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end())});
  std::vector<std::size_t> counts(c);
  std::vector<std::size_t> candidates;

  while (!stack.empty()) {
    Pending work = std::move(stack.back());
    stack.pop_back();
    const std::uint32_t depth = nodes[work.node].depth;
    const std::size_t n = work.rows.size();
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t r : work.rows) ++counts[ds.label(r)];
    nodes[work.node].n_train = static_cast<std::uint32_t>(n);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t v) { return v > 0; }) <= 1;
    const bool too_small = n < 2 * params.min_leaf;
    const bool at_depth = params.max_depth && depth >= *params.max_depth;
    std::optional<kernels::SplitChoice> split;
    if (!pure && !too_small && !at_depth) {
      if (subspace && subspace->size < d) {
        candidates = all_features;
        for (std::size_t i = 0; i < subspace->size; ++i) {
          std::swap(candidates[i], candidates[i + rng->below(d - i)]);
        }
        candidates.resize(subspace->size);
        std::sort(candidates.begin(), candidates.end());
      } else {
        candidates = all_features;
      }
      kernels::SplitRequest req;
      req.ds = &ds;
      req.rows = work.rows;
      req.features = candidates;
      req.weights = weights;
      req.parent_counts = counts;
      req.min_leaf = params.min_leaf;
      split = kernels::best_split(req);
      if (split && split->score <= params.min_gain) split.reset();
    }

    if (!split) {
      nodes[work.node].distribution = laplace(counts, n);
      continue;
    }

    std::vector<std::size_t> left, right;
    left.reserve(split->left_count);
    right.reserve(n - split->left_count);
    for (std::size_t r : work.rows) {
      (ds.at(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    if (left.empty() || right.empty()) throw InvariantError("split produced an empty child");

    const auto left_id = nodes.size();
    nodes.emplace_back();
    nodes.emplace_back();
    auto& node = nodes[work.node];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = static_cast<std::int32_t>(left_id);
    node.right = static_cast<std::int32_t>(left_id + 1);
    nodes[left_id].depth = depth + 1;
    nodes[left_id + 1].depth = depth + 1;
    work.rows.clear();
    work.rows.shrink_to_fit();
    // Right is pushed first so the left subtree is grown first.
    stack.push_back({left_id + 1, std::move(right)});
    stack.push_back({left_id, std::move(left)});
  }
  return DecisionTree(std::move(nodes), d, c, params);
}

}  // namespace idsforge
