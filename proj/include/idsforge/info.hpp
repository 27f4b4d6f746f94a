#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace idsforge {

/// Shannon entropy in bits of a class-count vector, with 0·log2(0) = 0.
/// Throws InputError when every count is zero.
double entropy(std::span<const std::size_t> counts);

/// Split information in bits of a partition of |D| instances into parts |D_j|.
double split_info(std::span<const std::size_t> partition_sizes);

/// Information gain of partitioning `parent` into `children` (per-class counts).
/// Throws InputError when the children do not sum to the parent.
double information_gain(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children);

/// Gain / SplitInfo; 0 when the split information is 0 or the gain is not positive.
double gain_ratio(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children);

}  // namespace idsforge
