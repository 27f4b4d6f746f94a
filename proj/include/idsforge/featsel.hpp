#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "idsforge/dataset.hpp"

namespace idsforge {

/// Column-major discretized copy of a dataset's features.
///
/// Features with at most `bins` distinct values keep one code per value.
/// Wider features use equal-frequency bins whose boundaries never separate
/// equal values.
struct BinnedFeatures {
  std::size_t rows = 0;
  std::size_t n_features = 0;
  std::vector<std::uint32_t> codes;       // codes[f * rows + r]
  std::vector<std::uint32_t> cardinality;  // distinct codes per feature

  std::span<const std::uint32_t> column(std::size_t f) const { return {codes.data() + f * rows, rows}; }
};

BinnedFeatures discretize(const Dataset& ds, std::size_t bins);

/// Labels as codes, for use with the discrete measures below.
std::vector<std::uint32_t> label_codes(const Dataset& ds);

double discrete_entropy(std::span<const std::uint32_t> x, std::uint32_t x_card);

/// IG(X;Y) = H(X) + H(Y) - H(X,Y), in bits.
double mutual_information(std::span<const std::uint32_t> x, std::uint32_t x_card, std::span<const std::uint32_t> y,
                          std::uint32_t y_card);

/// 2·IG(X;Y) / (H(X) + H(Y)); 0 when both entropies vanish.
double symmetric_uncertainty(std::span<const std::uint32_t> x, std::uint32_t x_card,
                             std::span<const std::uint32_t> y, std::uint32_t y_card);

/// Symmetric-uncertainty correlations between every feature and the class and
/// between every pair of features. Immutable once built.
class CorrelationCache {
 public:
  CorrelationCache(std::vector<double> feature_class, std::vector<double> feature_feature, std::size_t bins);

  std::size_t n_features() const { return feature_class_.size(); }
  std::size_t bins() const { return bins_; }
  double feature_class(std::size_t i) const { return feature_class_[i]; }
  double feature_feature(std::size_t i, std::size_t j) const { return feature_feature_[i * n_features() + j]; }
  std::span<const double> feature_class_all() const { return feature_class_; }
  std::span<const double> feature_feature_all() const { return feature_feature_; }

  // Feature with the highest class correlation (lowest index on ties).
  std::size_t strongest_feature() const;

 private:
  std::vector<double> feature_class_;
  std::vector<double> feature_feature_;  // row-major d x d
  std::size_t bins_;
};

CorrelationCache build_correlation_cache(const Dataset& ds, std::size_t bins = 10);

/// Nonempty set of feature indices stored as a bit mask.
class FeatureSubset {
 public:
  explicit FeatureSubset(std::vector<bool> mask);
  static FeatureSubset from_indices(std::size_t n_features, std::span<const std::size_t> indices);

  std::size_t n_features() const { return mask_.size(); }
  std::size_t size() const { return count_; }
  bool contains(std::size_t i) const { return mask_[i]; }
  const std::vector<bool>& mask() const { return mask_; }
  std::vector<std::size_t> indices() const;

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;

 private:
  std::vector<bool> mask_;
  std::size_t count_ = 0;
};

/// Tie-break order among equal-merit subsets: fewer features first, then the
/// lexicographically smaller mask.
bool preferred_on_tie(const FeatureSubset& a, const FeatureSubset& b);

/// CFS merit k·mean(r_cf) / sqrt(k + k(k-1)·mean(r_ff)).
double cfs_merit(const FeatureSubset& subset, const CorrelationCache& cache);

struct RankedFeature {
  std::size_t index = 0;
  double score = 0.0;
};

/// Features sorted by IG(feature; class), descending, ties by index.
std::vector<RankedFeature> ig_rank(const Dataset& ds, std::size_t bins = 10);

/// Features sorted by IG / H(feature), descending; zero-entropy features score 0.
std::vector<RankedFeature> igr_rank(const Dataset& ds, std::size_t bins = 10);

}  // namespace idsforge
