#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial reference in
// kernels::serial that the tests compare against and the benchmark times.
// Parallel and serial versions return bit-identical results.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "idsforge/featsel.hpp"

namespace idsforge {
class Dataset;
class Classifier;
struct ClassDistribution;
}  // namespace idsforge

namespace idsforge::kernels {

/// Row-major d x d symmetric-uncertainty matrix with a unit diagonal.
std::vector<double> su_matrix(const BinnedFeatures& binned);

/// Class correlation of each feature.
std::vector<double> su_with_labels(const BinnedFeatures& binned, std::span<const std::uint32_t> labels,
                                   std::uint32_t n_classes);

std::vector<double> merit_batch(std::span<const FeatureSubset> subsets, const CorrelationCache& cache);

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;  // gain ratio, times the feature weight when weights are given
  std::size_t left_count = 0;
};

struct SplitRequest {
  const Dataset* ds = nullptr;
  std::span<const std::size_t> rows;
  std::span<const std::size_t> features;      // candidate features
  std::span<const double> weights;            // empty, or one weight per dataset feature
  std::span<const std::size_t> parent_counts;  // per-class counts over `rows`
  std::size_t min_leaf = 1;
};

/// Best binary threshold split over the candidate features. Thresholds are
/// midpoints between consecutive distinct values; both sides keep at least
/// min_leaf rows. Ties prefer the earlier candidate, then the lower threshold.
std::optional<SplitChoice> best_split(const SplitRequest& request);

std::vector<ClassDistribution> predict_batch(const Classifier& model, const Dataset& ds,
                                             std::span<const std::size_t> rows);

namespace serial {

std::vector<double> su_matrix(const BinnedFeatures& binned);
std::vector<double> su_with_labels(const BinnedFeatures& binned, std::span<const std::uint32_t> labels,
                                   std::uint32_t n_classes);
std::vector<double> merit_batch(std::span<const FeatureSubset> subsets, const CorrelationCache& cache);
std::optional<SplitChoice> best_split(const SplitRequest& request);
std::vector<ClassDistribution> predict_batch(const Classifier& model, const Dataset& ds,
                                             std::span<const std::size_t> rows);

}  // namespace serial

}  // namespace idsforge::kernels
