#include "idsforge/info.hpp"

#include <cmath>
#include <numeric>

#include "idsforge/error.hpp"

namespace idsforge {

double entropy(std::span<const std::size_t> counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw InputError("entropy of an empty count vector");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double split_info(std::span<const std::size_t> partition_sizes) {
  // Same functional form as entropy, over partition sizes instead of classes.
  return entropy(partition_sizes);
}

double information_gain(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children) {
  std::vector<std::size_t> summed(parent.size(), 0);
  for (const auto& child : children) {
    if (child.size() != parent.size()) throw InputError("child class-count width differs from parent");
    for (std::size_t c = 0; c < child.size(); ++c) summed[c] += child[c];
  }
  for (std::size_t c = 0; c < parent.size(); ++c) {
    if (summed[c] != parent[c]) throw InputError("child counts do not partition the parent counts");
  }
  const double n = static_cast<double>(std::accumulate(parent.begin(), parent.end(), std::size_t{0}));
  double remainder = 0.0;
  for (const auto& child : children) {
    const std::size_t m = std::accumulate(child.begin(), child.end(), std::size_t{0});
    if (m == 0) continue;
    remainder += static_cast<double>(m) / n * entropy(child);
  }
  return entropy(parent) - remainder;
}

double gain_ratio(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children) {
  const double gain = information_gain(parent, children);
  std::vector<std::size_t> sizes;
  sizes.reserve(children.size());
  for (const auto& child : children) sizes.push_back(std::accumulate(child.begin(), child.end(), std::size_t{0}));
  const double si = split_info(sizes);
  // Rounding can leave a gain of ~1e-16 for children that mirror the parent.
  if (si <= 0.0 || gain <= 1e-12) return 0.0;
  return gain / si;
}

}  // namespace idsforge
