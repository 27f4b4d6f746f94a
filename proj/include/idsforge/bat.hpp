#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idsforge/featsel.hpp"

namespace idsforge {

/// Search-space bound on every position component. sigmoid(±6) stays inside
/// (0.0025, 0.9975), so no feature bit is ever frozen.
inline constexpr double kPositionBound = 6.0;

struct BatSwarmConfig {
  std::size_t n_bats = 30;
  double f_min = 0.0;
  double f_max = 2.0;
  double alpha = 0.9;
  double gamma = 0.9;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 1;
  std::size_t bins = 10;  // discretization used for the correlation cache

  /// Throws InputError on n_bats < 2, f_min > f_max, alpha outside (0,1),
  /// gamma <= 0, zero iterations or bins < 2.
  void validate() const;
};

struct Bat {
  std::vector<double> position;
  std::vector<double> velocity;
  double frequency = 0.0;
  double loudness = 1.0;
  double pulse_rate = 0.0;
  double initial_pulse_rate = 0.0;
  double best_fitness = 0.0;
  std::optional<FeatureSubset> best_subset;
};

/// Stochastic sigmoid transfer: bit i is set iff draws[i] < 1/(1+exp(-position[i])).
/// An empty result falls back to {guard}.
FeatureSubset binarize(std::span<const double> position, std::span<const double> draws, std::size_t guard);

/// Frequency, velocity and position update towards `best_position`:
/// f = f_min + (f_max - f_min)·beta, v' = v + (x - best)·f, x' = clamp(x + v').
Bat bat_step(const Bat& bat, std::span<const double> best_position, double beta, double f_min, double f_max);

/// x + epsilon·mean_loudness, clamped to the position bound.
std::vector<double> local_walk(std::span<const double> position, std::span<const double> epsilon,
                               double mean_loudness);

/// loudness <- alpha·loudness; pulse_rate <- r0·(1 - exp(-gamma·t)).
Bat update_loudness_rate(const Bat& bat, double alpha, double gamma, std::size_t t);

struct SelectionTrace {
  std::vector<double> best_merit;  // after each iteration
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double seconds = 0.0;
};

struct SelectionResult {
  FeatureSubset subset;
  double merit = 0.0;
  SelectionTrace trace;
};

/// CFS-BA: binary bat-algorithm search maximizing the CFS merit.
///
/// Every iteration first moves all bats against the best solution known at the
/// start of the iteration (serially, so random draws are consumed in a fixed
/// order), then scores the candidates in parallel, then folds the results into
/// the per-bat archives and the global best in bat order. The outcome depends
/// only on the seed, never on the thread count.
SelectionResult cfs_ba_select(const CorrelationCache& cache, const BatSwarmConfig& config);
SelectionResult cfs_ba_select(const Dataset& ds, const BatSwarmConfig& config);

}  // namespace idsforge
