#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "idsforge/dataset.hpp"
#include "idsforge/featsel.hpp"
#include "idsforge/rng.hpp"

namespace testing {

using namespace idsforge;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(IDSFORGE_FIXTURE_DIR) / name;
}

inline Dataset play_tennis() {
  return encode(load_csv(fixture("play_tennis.csv"), std::string("play"), true));
}

/// Dataset from row vectors; class names are "c0", "c1", ...
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<ClassIndex>& labels,
                            std::size_t n_classes, ClassIndex normal = 0) {
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
  std::vector<FeatureMeta> meta(d);
  for (std::size_t j = 0; j < d; ++j) {
    meta[j].name = "f" + std::to_string(j);
    double lo = rows.front()[j], hi = rows.front()[j];
    for (const auto& r : rows) {
      lo = std::min(lo, r[j]);
      hi = std::max(hi, r[j]);
    }
    meta[j].observed_min = lo;
    meta[j].observed_max = hi;
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n_classes; ++c) names.push_back("c" + std::to_string(c));
  return Dataset(std::move(values), d, std::move(meta), labels, std::move(names), normal);
}

/// Two classes split by x0 + x1 > 1 with a margin; the other features are noise.
inline Dataset separable(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<ClassIndex> labels;
  while (rows.size() < n) {
    std::vector<double> r(d);
    for (auto& v : r) v = rng.uniform();
    const double s = r[0] + r[1] - 1.0;
    if (std::abs(s) < 0.1) continue;
    labels.push_back(s > 0 ? 1 : 0);
    rows.push_back(std::move(r));
  }
  return make_dataset(rows, labels, 2);
}

/// Feature 0 equals the label; features 1..d-1 are independent noise.
inline Dataset label_leak(std::size_t n, std::size_t d, std::size_t n_classes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<ClassIndex> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const ClassIndex y = i % n_classes;
    std::vector<double> r(d);
    r[0] = static_cast<double>(y);
    for (std::size_t j = 1; j < d; ++j) r[j] = rng.uniform();
    rows.push_back(std::move(r));
    labels.push_back(y);
  }
  return make_dataset(rows, labels, n_classes);
}

/// Mix of informative, redundant and noisy features for subset-search tests.
inline Dataset mixed_relevance(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n_classes = 2 + rng.below(2);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<ClassIndex> labels(n);
  std::vector<double> noise_level(d);
  std::vector<std::size_t> source(d);
  for (std::size_t j = 0; j < d; ++j) {
    noise_level[j] = rng.uniform(0.0, 1.5);
    source[j] = j < 3 ? j : rng.below(3);  // later features echo one of the first three
  }
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.below(n_classes);
    std::vector<double> base(3);
    for (auto& b : base) b = static_cast<double>(labels[i]) + rng.uniform(-1.0, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      rows[i][j] = j < 3 ? base[j] + noise_level[j] * rng.uniform(-1.0, 1.0)
                         : base[source[j]] + noise_level[j] * rng.uniform(-1.0, 1.0);
      if (rng.uniform() < 0.25 && j >= 3) rows[i][j] = rng.uniform(-1.0, 3.0);
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) labels[c] = c;  // every class present
  return make_dataset(rows, labels, n_classes);
}

/// Highest CFS merit over every nonempty subset, computed straight from the
/// cached correlations. Returns (merit, mask as bits).
inline std::pair<double, std::uint32_t> exhaustive_cfs(const CorrelationCache& cache) {
  const std::size_t d = cache.n_features();
  double best = -1.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    double rcf = 0.0, rff = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (!(mask >> i & 1u)) continue;
      ++k;
      rcf += cache.feature_class(i);
      for (std::size_t j = i + 1; j < d; ++j) {
        if (mask >> j & 1u) rff += cache.feature_feature(i, j);
      }
    }
    const double kk = static_cast<double>(k);
    const double mean_ff = k > 1 ? rff / (kk * (kk - 1) / 2) : 0.0;
    const double merit = (rcf / kk) * kk / std::sqrt(kk + kk * (kk - 1) * mean_ff);
    if (merit > best) {
      best = merit;
      best_mask = mask;
    }
  }
  return {best, best_mask};
}

inline double oracle_entropy(const std::vector<double>& counts) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= (c / n) * std::log2(c / n);
  }
  return h;
}

struct OracleSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
  double ratio = -1.0;
};

/// Exhaustive search over every feature and every midpoint between distinct values.
inline OracleSplit oracle_best_split(const Dataset& ds, const std::vector<std::size_t>& rows, std::size_t min_leaf) {
  OracleSplit best;
  std::vector<double> parent(ds.n_classes(), 0.0);
  for (auto r : rows) parent[ds.label(r)] += 1;
  const double h = oracle_entropy(parent);
  const double n = static_cast<double>(rows.size());
  for (std::size_t f = 0; f < ds.n_features(); ++f) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(ds.at(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double t = (values[v] + values[v + 1]) / 2;
      std::vector<double> left(ds.n_classes(), 0.0), right(ds.n_classes(), 0.0);
      for (auto r : rows) (ds.at(r, f) <= t ? left : right)[ds.label(r)] += 1;
      const double nl = std::accumulate(left.begin(), left.end(), 0.0);
      const double nr = n - nl;
      if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf)) continue;
      const double gain = h - nl / n * oracle_entropy(left) - nr / n * oracle_entropy(right);
      const double si = oracle_entropy({nl, nr});
      const double ratio = gain > 1e-12 ? gain / si : 0.0;
      if (ratio > best.ratio + 1e-12) best = {f, t, ratio};
    }
  }
  return best;
}

inline std::vector<std::size_t> all_rows(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace testing
