#include "idsforge/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idsforge/error.hpp"
#include "idsforge/kernels.hpp"

namespace idsforge {

BinnedFeatures discretize(const Dataset& ds, std::size_t bins) {
  if (bins < 2) throw InputError("bin count must be at least 2");
  const std::size_t n = ds.rows();
  const std::size_t d = ds.n_features();
  BinnedFeatures out;
  out.rows = n;
  out.n_features = d;
  out.codes.assign(n * d, 0);
  out.cardinality.assign(d, 1);

  std::vector<std::size_t> order(n);
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ds.at(a, f) < ds.at(b, f); });

    std::size_t distinct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || ds.at(order[i], f) != ds.at(order[i - 1], f)) ++distinct;
    }
    auto* col = out.codes.data() + f * n;
    std::uint32_t code = 0;
    std::uint32_t last_bin = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool new_value = i == 0 || ds.at(order[i], f) != ds.at(order[i - 1], f);
      if (new_value && i > 0) {
        if (distinct <= bins) {
          ++code;
        } else {
          // Bin of a value group is set by the rank where the group starts.
          const auto bin = static_cast<std::uint32_t>(i * bins / n);
          if (bin != last_bin) {
            ++code;
            last_bin = bin;
          }
        }
      }
      col[order[i]] = code;
    }
    out.cardinality[f] = n ? code + 1 : 1;
  }
  return out;
}

std::vector<std::uint32_t> label_codes(const Dataset& ds) {
  std::vector<std::uint32_t> out(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) out[r] = static_cast<std::uint32_t>(ds.label(r));
  return out;
}

namespace {

double entropy_of_counts(std::span<const std::size_t> counts, double n) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

double discrete_entropy(std::span<const std::uint32_t> x, std::uint32_t x_card) {
  if (x.empty()) return 0.0;
  std::vector<std::size_t> counts(x_card, 0);
  for (auto v : x) ++counts[v];
  return entropy_of_counts(counts, static_cast<double>(x.size()));
}

double mutual_information(std::span<const std::uint32_t> x, std::uint32_t x_card, std::span<const std::uint32_t> y,
                          std::uint32_t y_card) {
  if (x.size() != y.size()) throw InputError("mutual information over vectors of different length");
  if (x.empty()) return 0.0;
  std::vector<std::size_t> joint(static_cast<std::size_t>(x_card) * y_card, 0);
  std::vector<std::size_t> cx(x_card, 0), cy(y_card, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[static_cast<std::size_t>(x[i]) * y_card + y[i]];
    ++cx[x[i]];
    ++cy[y[i]];
  }
  const double n = static_cast<double>(x.size());
  const double mi = entropy_of_counts(cx, n) + entropy_of_counts(cy, n) - entropy_of_counts(joint, n);
  return std::max(0.0, mi);
}

double symmetric_uncertainty(std::span<const std::uint32_t> x, std::uint32_t x_card,
                             std::span<const std::uint32_t> y, std::uint32_t y_card) {
  if (x.size() != y.size()) throw InputError("symmetric uncertainty over vectors of different length");
  if (x.empty()) return 0.0;
  std::vector<std::size_t> joint(static_cast<std::size_t>(x_card) * y_card, 0);
  std::vector<std::size_t> cx(x_card, 0), cy(y_card, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[static_cast<std::size_t>(x[i]) * y_card + y[i]];
    ++cx[x[i]];
    ++cy[y[i]];
  }
  const double n = static_cast<double>(x.size());
  const double hx = entropy_of_counts(cx, n);
  const double hy = entropy_of_counts(cy, n);
  if (hx + hy <= 0.0) return 0.0;
  const double ig = hx + hy - entropy_of_counts(joint, n);
  return std::clamp(2.0 * ig / (hx + hy), 0.0, 1.0);
}

CorrelationCache::CorrelationCache(std::vector<double> fc, std::vector<double> ff,
                                   std::size_t bins)
    : feature_class_(std::move(fc)), feature_feature_(std::move(ff)), bins_(bins) {
  const std::size_t d = feature_class_.size();
  if (d == 0) throw InputError("correlation cache needs at least one feature");
  if (feature_feature_.size() != d * d) throw InvariantError("feature-feature matrix is not d x d");
  for (double v : feature_class_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("feature-class correlation outside [0,1]");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (feature_feature(i, i) != 1.0) throw InvariantError("feature-feature diagonal must be 1");
    for (std::size_t j = 0; j < d; ++j) {
      const double v = feature_feature(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("feature-feature correlation outside [0,1]");
      if (v != feature_feature(j, i)) throw InvariantError("feature-feature matrix is not symmetric");
    }
  }
}

std::size_t CorrelationCache::strongest_feature() const {
  return static_cast<std::size_t>(std::max_element(feature_class_.begin(), feature_class_.end()) -
                                  feature_class_.begin());
}

CorrelationCache build_correlation_cache(const Dataset& ds, std::size_t bins) {
  if (ds.rows() == 0) throw InputError("cannot correlate an empty dataset");
  const BinnedFeatures binned = discretize(ds, bins);
  const auto labels = label_codes(ds);
  auto fc = kernels::su_with_labels(binned, labels, static_cast<std::uint32_t>(ds.n_classes()));
  auto ff = kernels::su_matrix(binned);
  return CorrelationCache(std::move(fc), std::move(ff), bins);
}

FeatureSubset::FeatureSubset(std::vector<bool> mask) : mask_(std::move(mask)) {
  count_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
  if (count_ == 0) throw InputError("feature subset must contain at least one feature");
}

FeatureSubset FeatureSubset::from_indices(std::size_t n_features, std::span<const std::size_t> indices) {
  std::vector<bool> mask(n_features, false);
  for (std::size_t i : indices) {
    if (i >= n_features) throw InputError("feature index " + std::to_string(i) + " out of range");
    mask[i] = true;
  }
  return FeatureSubset(std::move(mask));
}

std::vector<std::size_t> FeatureSubset::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) out.push_back(i);
  }
  return out;
}

bool preferred_on_tie(const FeatureSubset& a, const FeatureSubset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  // Compare as bit strings from feature 0: a set bit sorts after a clear one.
  return a.mask() < b.mask();
}

double cfs_merit(const FeatureSubset& subset, const CorrelationCache& cache) {
  if (subset.n_features() != cache.n_features()) throw InputError("subset width does not match correlation cache");
  const auto idx = subset.indices();
  const double k = static_cast<double>(idx.size());
  double sum_cf = 0.0;
  for (std::size_t i : idx) sum_cf += cache.feature_class(i);
  double sum_ff = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) sum_ff += cache.feature_feature(idx[a], idx[b]);
  }
  const double mean_cf = sum_cf / k;
  const double mean_ff = idx.size() > 1 ? sum_ff / (k * (k - 1.0) / 2.0) : 0.0;
  return k * mean_cf / std::sqrt(k + k * (k - 1.0) * mean_ff);
}

namespace {

std::vector<RankedFeature> sorted_ranking(std::vector<double> scores) {
  std::vector<RankedFeature> out;
  out.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({i, scores[i]});
  std::stable_sort(out.begin(), out.end(), [](const RankedFeature& a, const RankedFeature& b) {
    return a.score > b.score;
  });
  return out;
}

}  // namespace

std::vector<RankedFeature> ig_rank(const Dataset& ds, std::size_t bins) {
  const auto binned = discretize(ds, bins);
  const auto labels = label_codes(ds);
  const auto c = static_cast<std::uint32_t>(ds.n_classes());
  std::vector<double> scores(ds.n_features());
  for (std::size_t f = 0; f < ds.n_features(); ++f) {
    scores[f] = mutual_information(binned.column(f), binned.cardinality[f], labels, c);
  }
  return sorted_ranking(std::move(scores));
}

std::vector<RankedFeature> igr_rank(const Dataset& ds, std::size_t bins) {
  const auto binned = discretize(ds, bins);
  const auto labels = label_codes(ds);
  const auto c = static_cast<std::uint32_t>(ds.n_classes());
  std::vector<double> scores(ds.n_features());
  for (std::size_t f = 0; f < ds.n_features(); ++f) {
    const double h = discrete_entropy(binned.column(f), binned.cardinality[f]);
    // Guard against near-zero entropies left over from rounding.
    if (h <= 1e-12) {
      scores[f] = 0.0;
      continue;
    }
    const double ig = mutual_information(binned.column(f), binned.cardinality[f], labels, c);
    scores[f] = std::min(1.0, ig / h);
  }
  return sorted_ranking(std::move(scores));
}

}  // namespace idsforge
