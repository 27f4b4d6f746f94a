#include "idsforge/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "idsforge/dataset.hpp"
#include "idsforge/error.hpp"
#include "idsforge/tree.hpp"

namespace idsforge::kernels {

namespace {

// Below this many (row, feature) pairs a node's split search stays serial.
constexpr std::size_t kParallelSplitWork = 1 << 15;

double entropy_bits(std::span<const std::size_t> counts, double n) {
  double h = 0.0;
  for (std::size_t v : counts) {
    if (v == 0) continue;
    const double p = static_cast<double>(v) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::optional<SplitChoice> best_split_on_feature(const SplitRequest& req, std::size_t feature) {
  const Dataset& ds = *req.ds;
  const std::size_t n = req.rows.size();
  const std::size_t c = req.parent_counts.size();
  const double weight = req.weights.empty() ? 1.0 : req.weights[feature];

  std::vector<std::pair<double, ClassIndex>> sorted;
  sorted.reserve(n);
  for (std::size_t r : req.rows) sorted.emplace_back(ds.at(r, feature), ds.label(r));
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front().first == sorted.back().first) return std::nullopt;

  const double total = static_cast<double>(n);
  const double parent_h = entropy_bits(req.parent_counts, total);
  std::vector<std::size_t> left(c, 0), right(req.parent_counts.begin(), req.parent_counts.end());

  std::optional<SplitChoice> best;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ++left[sorted[i].second];
    --right[sorted[i].second];
    const std::size_t nl = i + 1;
    const std::size_t nr = n - nl;
    if (sorted[i].first == sorted[i + 1].first) continue;
    if (nl < req.min_leaf || nr < req.min_leaf) continue;
    const double pl = static_cast<double>(nl) / total;
    const double pr = static_cast<double>(nr) / total;
    const double gain = parent_h - pl * entropy_bits(left, static_cast<double>(nl)) -
                        pr * entropy_bits(right, static_cast<double>(nr));
    const double si = -pl * std::log2(pl) - pr * std::log2(pr);
    const double ratio = (si <= 0.0 || gain <= 1e-12) ? 0.0 : gain / si;
    const double score = ratio * weight;
    if (!best || score > best->score) {
      double threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
      if (!(threshold < sorted[i + 1].first)) threshold = sorted[i].first;
      best = SplitChoice{feature, threshold, score, nl};
    }
  }
  return best;
}

std::optional<SplitChoice> reduce_splits(const std::vector<std::optional<SplitChoice>>& per_feature) {
  std::optional<SplitChoice> best;
  for (const auto& s : per_feature) {
    if (s && (!best || s->score > best->score)) best = s;
  }
  return best;
}

void check_request(const SplitRequest& req) {
  if (req.ds == nullptr || req.rows.empty()) throw InputError("split search needs a dataset and rows");
  if (req.parent_counts.size() != req.ds->n_classes()) throw InputError("parent counts width mismatch");
  for (auto f : req.features) {
    if (f >= req.ds->n_features()) throw InputError("split feature " + std::to_string(f) + " out of range");
  }
  if (!req.weights.empty() && req.weights.size() != req.ds->n_features()) {
    throw InputError("split weights need one entry per dataset feature");
  }
  for (auto r : req.rows) {
    if (r >= req.ds->rows()) throw InputError("split row " + std::to_string(r) + " out of range");
  }
}

// Exceptions must not escape an OpenMP region, so inputs are checked up front.
void check_predict(const Classifier& model, const Dataset& ds, std::span<const std::size_t> rows) {
  for (auto r : rows) {
    if (r >= ds.rows()) throw InputError("row " + std::to_string(r) + " out of range");
  }
  if (model.n_features() != ds.n_features()) {
    throw InputError("dataset has " + std::to_string(ds.n_features()) + " features, model expects " +
                     std::to_string(model.n_features()));
  }
}

void check_subsets(std::span<const FeatureSubset> subsets, const CorrelationCache& cache) {
  for (const auto& s : subsets) {
    if (s.n_features() != cache.n_features()) throw InputError("subset width does not match correlation cache");
  }
}

}  // namespace

namespace serial {

std::vector<double> su_matrix(const BinnedFeatures& binned) {
  const std::size_t d = binned.n_features;
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    out[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      const double su =
          symmetric_uncertainty(binned.column(i), binned.cardinality[i], binned.column(j), binned.cardinality[j]);
      out[i * d + j] = su;
      out[j * d + i] = su;
    }
  }
  return out;
}

std::vector<double> su_with_labels(const BinnedFeatures& binned, std::span<const std::uint32_t> labels,
                                   std::uint32_t n_classes) {
  std::vector<double> out(binned.n_features);
  for (std::size_t f = 0; f < binned.n_features; ++f) {
    out[f] = symmetric_uncertainty(binned.column(f), binned.cardinality[f], labels, n_classes);
  }
  return out;
}

std::vector<double> merit_batch(std::span<const FeatureSubset> subsets, const CorrelationCache& cache) {
  std::vector<double> out(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) out[i] = cfs_merit(subsets[i], cache);
  return out;
}

std::optional<SplitChoice> best_split(const SplitRequest& req) {
  check_request(req);
  std::vector<std::optional<SplitChoice>> per_feature(req.features.size());
  for (std::size_t i = 0; i < req.features.size(); ++i) {
    per_feature[i] = best_split_on_feature(req, req.features[i]);
  }
  return reduce_splits(per_feature);
}

std::vector<ClassDistribution> predict_batch(const Classifier& model, const Dataset& ds,
                                             std::span<const std::size_t> rows) {
  std::vector<ClassDistribution> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = model.predict(ds.row(rows[i]));
  return out;
}

}  // namespace serial

std::vector<double> su_matrix(const BinnedFeatures& binned) {
  const std::size_t d = binned.n_features;
  std::vector<double> out(d * d, 0.0);
  const auto pairs = static_cast<std::ptrdiff_t>(d * d);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t p = 0; p < pairs; ++p) {
    const auto i = static_cast<std::size_t>(p) / d;
    const auto j = static_cast<std::size_t>(p) % d;
    if (j <= i) continue;
    const double su =
        symmetric_uncertainty(binned.column(i), binned.cardinality[i], binned.column(j), binned.cardinality[j]);
    out[i * d + j] = su;
    out[j * d + i] = su;
  }
  for (std::size_t i = 0; i < d; ++i) out[i * d + i] = 1.0;
  return out;
}

std::vector<double> su_with_labels(const BinnedFeatures& binned, std::span<const std::uint32_t> labels,
                                   std::uint32_t n_classes) {
  std::vector<double> out(binned.n_features);
  const auto d = static_cast<std::ptrdiff_t>(binned.n_features);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t f = 0; f < d; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    out[fi] = symmetric_uncertainty(binned.column(fi), binned.cardinality[fi], labels, n_classes);
  }
  return out;
}

std::vector<double> merit_batch(std::span<const FeatureSubset> subsets, const CorrelationCache& cache) {
  check_subsets(subsets, cache);
  std::vector<double> out(subsets.size());
  const auto count = static_cast<std::ptrdiff_t>(subsets.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = cfs_merit(subsets[static_cast<std::size_t>(i)], cache);
  }
  return out;
}

std::optional<SplitChoice> best_split(const SplitRequest& req) {
  check_request(req);
  const std::size_t work = req.rows.size() * req.features.size();
  std::vector<std::optional<SplitChoice>> per_feature(req.features.size());
  const auto count = static_cast<std::ptrdiff_t>(req.features.size());
#pragma omp parallel for schedule(dynamic) if (work >= kParallelSplitWork && !omp_in_parallel())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto fi = static_cast<std::size_t>(i);
    per_feature[fi] = best_split_on_feature(req, req.features[fi]);
  }
  return reduce_splits(per_feature);
}

std::vector<ClassDistribution> predict_batch(const Classifier& model, const Dataset& ds,
                                             std::span<const std::size_t> rows) {
  check_predict(model, ds, rows);
  std::vector<ClassDistribution> out(rows.size());
  const auto count = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto ri = static_cast<std::size_t>(i);
    out[ri] = model.predict(ds.row(rows[ri]));
  }
  return out;
}

}  // namespace idsforge::kernels
