#include "idsforge/forest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "idsforge/error.hpp"
#include "idsforge/rng.hpp"

namespace idsforge {

std::pair<double, double> weight_range(std::size_t level, double rho) {
  if (level == 0) throw InputError("weight range level starts at 1");
  const double hi = std::exp(-1.0 / static_cast<double>(level));
  if (level == 1) return {0.0, hi};
  double lo = std::exp(-1.0 / static_cast<double>(level - 1)) + rho;
  // Past roughly level 1/sqrt(rho) adjacent bands are narrower than rho.
  lo = std::min(lo, hi);
  return {lo, hi};
}

double weight_increment(double weight, std::size_t tree_height, std::size_t level) {
  const double span = static_cast<double>(tree_height + 1) - static_cast<double>(level);
  return (1.0 - weight) / std::max(1.0, span);
}

AttributeWeights::AttributeWeights(std::size_t n_features, double rho)
    : weights_(n_features, 1.0), last_level_(n_features, 0), increments_(n_features, 0.0), rho_(rho) {
  if (!(rho > 0.0)) throw InputError("rho must be positive");
}

void AttributeWeights::update(const DecisionTree& latest, Rng& rng) {
  if (latest.n_features() != weights_.size()) throw InputError("tree width does not match attribute weights");
  const auto levels = latest.tested_levels();
  const std::size_t height = latest.height();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (levels[i] > 0) {
      const auto [lo, hi] = weight_range(levels[i], rho_);
      // uniform_nonzero keeps level-1 weights strictly positive.
      weights_[i] = lo + (hi - lo) * rng.uniform_nonzero();
      last_level_[i] = levels[i];
      increments_[i] = weight_increment(weights_[i], height, levels[i]);
    } else {
      weights_[i] = std::min(1.0, weights_[i] + increments_[i]);
    }
  }
}

Forest::Forest(std::vector<DecisionTree> trees, ForestKind kind, std::vector<std::uint64_t> bootstrap_seeds,
               std::optional<double> oob_error, std::size_t subspace_size,
               std::optional<AttributeWeights> final_weights)
    : trees_(std::move(trees)),
      kind_(kind),
      bootstrap_seeds_(std::move(bootstrap_seeds)),
      oob_error_(oob_error),
      subspace_size_(subspace_size),
      final_weights_(std::move(final_weights)) {
  if (trees_.empty()) throw InputError("forest needs at least one tree");
  for (const auto& t : trees_) {
    if (t.n_features() != trees_.front().n_features() || t.n_classes() != trees_.front().n_classes()) {
      throw InvariantError("forest members disagree on feature or class count");
    }
  }
  if (oob_error_ && !(*oob_error_ >= 0.0 && *oob_error_ <= 1.0)) throw InvariantError("OOB error outside [0,1]");
}

ClassDistribution Forest::predict(std::span<const double> row) const {
  std::vector<double> mean(n_classes(), 0.0);
  for (const auto& t : trees_) {
    const auto& p = t.nodes()[t.leaf_index(row)].distribution.probs;
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += p[c];
  }
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (double& v : mean) v *= inv;
  return ClassDistribution(std::move(mean));
}

std::vector<std::size_t> bootstrap_positions(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> out(n);
  for (auto& p : out) p = rng.below(n);
  return out;
}

std::uint64_t bootstrap_seed(std::uint64_t seed, std::size_t tree) { return Rng::mix(seed ^ Rng::mix(2 * tree)); }
std::uint64_t subspace_seed(std::uint64_t seed, std::size_t tree) { return Rng::mix(seed ^ Rng::mix(2 * tree + 1)); }
std::uint64_t weight_seed(std::uint64_t seed) { return Rng::mix(seed ^ 0x5eedf0e57ULL); }

std::size_t default_subspace_size(std::size_t n_features) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
}

namespace {

std::vector<std::size_t> gather(std::span<const std::size_t> rows, std::span<const std::size_t> positions) {
  std::vector<std::size_t> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out[i] = rows[positions[i]];
  return out;
}

// Majority vote of the trees for which each row was out of bag; ties go to the
// lowest class. Rows that were in every bootstrap are skipped.
std::optional<double> oob_error(const Dataset& ds, std::span<const std::size_t> rows,
                                const std::vector<DecisionTree>& trees,
                                const std::vector<std::vector<std::uint8_t>>& in_bag) {
  const std::size_t c = ds.n_classes();
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
  std::size_t evaluated = 0;
  std::size_t wrong = 0;
#pragma omp parallel for schedule(static) reduction(+ : evaluated, wrong)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto pos = static_cast<std::size_t>(i);
    std::vector<std::size_t> votes(c, 0);
    bool any = false;
    for (std::size_t t = 0; t < trees.size(); ++t) {
      if (in_bag[t][pos]) continue;
      any = true;
      const auto row = ds.row(rows[pos]);
      ++votes[trees[t].nodes()[trees[t].leaf_index(row)].distribution.argmax()];
    }
    if (!any) continue;
    ++evaluated;
    const auto winner = static_cast<ClassIndex>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    if (winner != ds.label(rows[pos])) ++wrong;
  }
  if (evaluated == 0) return std::nullopt;
  return static_cast<double>(wrong) / static_cast<double>(evaluated);
}

std::vector<std::uint8_t> in_bag_flags(std::size_t n, std::span<const std::size_t> positions) {
  std::vector<std::uint8_t> flags(n, 0);
  for (std::size_t p : positions) flags[p] = 1;
  return flags;
}

void check_fit_inputs(const Dataset& ds, std::span<const std::size_t> rows, std::size_t n_trees) {
  if (rows.empty()) throw InputError("cannot fit a forest on zero rows");
  if (n_trees == 0) throw InputError("forest needs at least one tree");
  for (std::size_t r : rows) {
    if (r >= ds.rows()) throw InputError("row index out of range");
  }
}

}  // namespace

Forest rf_fit(const Dataset& ds, std::span<const std::size_t> rows, std::size_t n_trees, const TreeParams& params,
              std::uint64_t seed) {
  check_fit_inputs(ds, rows, n_trees);
  const std::size_t n = rows.size();
  const std::size_t mtry = default_subspace_size(ds.n_features());
  std::vector<std::optional<DecisionTree>> grown(n_trees);
  std::vector<std::vector<std::uint8_t>> in_bag(n_trees);
  std::vector<std::uint64_t> seeds(n_trees);
  std::exception_ptr failure;

  const auto count = static_cast<std::ptrdiff_t>(n_trees);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ti = 0; ti < count; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    try {
      seeds[t] = bootstrap_seed(seed, t);
      const auto positions = bootstrap_positions(n, seeds[t]);
      in_bag[t] = in_bag_flags(n, positions);
      const auto sample = gather(rows, positions);
      grown[t].emplace(c45_fit(ds, sample, params, {}, SubspaceSampling{mtry, subspace_seed(seed, t)}));
    } catch (...) {
#pragma omp critical(idsforge_rf_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<DecisionTree> trees;
  trees.reserve(n_trees);
  for (auto& t : grown) trees.push_back(std::move(*t));
  auto oob = oob_error(ds, rows, trees, in_bag);
  return Forest(std::move(trees), ForestKind::random_forest, std::move(seeds), oob, mtry);
}

Forest forest_pa_fit(const Dataset& ds, std::span<const std::size_t> rows, std::size_t n_trees,
                     const TreeParams& params, double rho, std::uint64_t seed) {
  check_fit_inputs(ds, rows, n_trees);
  const std::size_t n = rows.size();
  AttributeWeights weights(ds.n_features(), rho);
  Rng weight_rng(weight_seed(seed));
  std::vector<DecisionTree> trees;
  trees.reserve(n_trees);
  std::vector<std::vector<std::uint8_t>> in_bag(n_trees);
  std::vector<std::uint64_t> seeds(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    seeds[t] = bootstrap_seed(seed, t);
    const auto positions = bootstrap_positions(n, seeds[t]);
    in_bag[t] = in_bag_flags(n, positions);
    trees.push_back(c45_fit(ds, gather(rows, positions), params, weights.weights()));
    weights.update(trees.back(), weight_rng);
  }
  auto oob = oob_error(ds, rows, trees, in_bag);
  return Forest(std::move(trees), ForestKind::forest_pa, std::move(seeds), oob, ds.n_features(), std::move(weights));
}

}  // namespace idsforge
