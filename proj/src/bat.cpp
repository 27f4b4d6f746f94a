#include "idsforge/bat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "idsforge/error.hpp"
#include "idsforge/kernels.hpp"
#include "idsforge/rng.hpp"

namespace idsforge {

void BatSwarmConfig::validate() const {
  if (n_bats < 2) throw InputError("bat swarm needs at least 2 bats");
  if (!(f_min <= f_max)) throw InputError("f_min must not exceed f_max");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  if (max_iterations < 1) throw InputError("max_iterations must be at least 1");
  if (bins < 2) throw InputError("bin count must be at least 2");
}

FeatureSubset binarize(std::span<const double> position, std::span<const double> draws, std::size_t guard) {
  if (position.size() != draws.size()) throw InputError("position and draw vectors differ in length");
  if (guard >= position.size()) throw InputError("guard feature out of range");
  std::vector<bool> mask(position.size(), false);
  bool any = false;
  for (std::size_t i = 0; i < position.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-position[i]));
    mask[i] = draws[i] < p;
    any = any || mask[i];
  }
  if (!any) mask[guard] = true;
  return FeatureSubset(std::move(mask));
}

Bat bat_step(const Bat& bat, std::span<const double> best_position, double beta, double f_min, double f_max) {
  if (best_position.size() != bat.position.size() || bat.velocity.size() != bat.position.size()) {
    throw InputError("bat and best position dimensions differ");
  }
  Bat out = bat;
  out.frequency = f_min + (f_max - f_min) * beta;
  for (std::size_t i = 0; i < out.position.size(); ++i) {
    out.velocity[i] = bat.velocity[i] + (bat.position[i] - best_position[i]) * out.frequency;
    out.position[i] = std::clamp(bat.position[i] + out.velocity[i], -kPositionBound, kPositionBound);
  }
  return out;
}

std::vector<double> local_walk(std::span<const double> position, std::span<const double> epsilon,
                               double mean_loudness) {
  if (position.size() != epsilon.size()) throw InputError("position and epsilon dimensions differ");
  if (mean_loudness < 0.0) throw InputError("mean loudness must be non-negative");
  std::vector<double> out(position.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(position[i] + epsilon[i] * mean_loudness, -kPositionBound, kPositionBound);
  }
  return out;
}

Bat update_loudness_rate(const Bat& bat, double alpha, double gamma, std::size_t t) {
  Bat out = bat;
  out.loudness = alpha * bat.loudness;
  out.pulse_rate = bat.initial_pulse_rate * (1.0 - std::exp(-gamma * static_cast<double>(t)));
  return out;
}

namespace {

struct Best {
  std::vector<double> position;
  std::optional<FeatureSubset> subset;
  double merit = -1.0;

  bool improved_by(double merit_new, const FeatureSubset& s) const {
    if (!subset) return true;
    if (merit_new != merit) return merit_new > merit;
    return preferred_on_tie(s, *subset);
  }
};

}  // namespace

SelectionResult cfs_ba_select(const CorrelationCache& cache, const BatSwarmConfig& config) {
  config.validate();
  const std::size_t d = cache.n_features();
  if (d < 2) throw InputError("feature selection needs at least 2 features");
  const auto start = std::chrono::steady_clock::now();

  Rng rng(config.seed);
  const std::size_t guard = cache.strongest_feature();
  const std::size_t n = config.n_bats;

  auto draw_vector = [&](double lo, double hi) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
  };

  std::vector<Bat> bats(n);
  std::vector<FeatureSubset> candidates;
  candidates.reserve(n);
  for (auto& bat : bats) {
    bat.position = draw_vector(-1.0, 1.0);
    bat.velocity.assign(d, 0.0);
    bat.loudness = rng.uniform(1.0, 2.0);
    bat.initial_pulse_rate = rng.uniform();
    bat.pulse_rate = bat.initial_pulse_rate;
    candidates.push_back(binarize(bat.position, draw_vector(0.0, 1.0), guard));
  }

  SelectionTrace trace;
  auto merits = kernels::merit_batch(candidates, cache);
  trace.evaluations += n;
  Best best;
  for (std::size_t i = 0; i < n; ++i) {
    bats[i].best_fitness = merits[i];
    bats[i].best_subset = candidates[i];
    if (best.improved_by(merits[i], candidates[i])) {
      best = Best{bats[i].position, candidates[i], merits[i]};
    }
  }

  std::vector<std::vector<double>> proposed(n);
  std::vector<double> accept_draw(n);
  for (std::size_t t = 1; t <= config.max_iterations; ++t) {
    double mean_loudness = 0.0;
    for (const auto& bat : bats) mean_loudness += bat.loudness;
    mean_loudness /= static_cast<double>(n);

    candidates.clear();
    for (std::size_t i = 0; i < n; ++i) {
      bats[i] = bat_step(bats[i], best.position, rng.uniform(), config.f_min, config.f_max);
      if (rng.uniform() > bats[i].pulse_rate) {
        proposed[i] = local_walk(best.position, draw_vector(-1.0, 1.0), mean_loudness);
      } else {
        proposed[i] = bats[i].position;
      }
      candidates.push_back(binarize(proposed[i], draw_vector(0.0, 1.0), guard));
      accept_draw[i] = rng.uniform();
    }

    merits = kernels::merit_batch(candidates, cache);
    trace.evaluations += n;

    for (std::size_t i = 0; i < n; ++i) {
      auto& bat = bats[i];
      if (bat.best_fitness <= merits[i] && accept_draw[i] < bat.loudness) {
        bat.best_fitness = merits[i];
        bat.best_subset = candidates[i];
        bat = update_loudness_rate(bat, config.alpha, config.gamma, t);
      }
      if (best.improved_by(merits[i], candidates[i])) {
        best = Best{proposed[i], candidates[i], merits[i]};
      }
    }
    trace.best_merit.push_back(best.merit);
    ++trace.iterations;
  }

  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return SelectionResult{*best.subset, best.merit, std::move(trace)};
}

SelectionResult cfs_ba_select(const Dataset& ds, const BatSwarmConfig& config) {
  config.validate();
  return cfs_ba_select(build_correlation_cache(ds, config.bins), config);
}

}  // namespace idsforge
