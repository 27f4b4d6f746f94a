#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idsforge/ensemble.hpp"
#include "idsforge/forest.hpp"
#include "idsforge/metrics.hpp"

namespace idsforge {

enum class LearnerKind { c45, random_forest, forest_pa };

std::string_view to_string(LearnerKind kind);
/// Accepts "c45", "rf" / "random-forest", "forest-pa" / "forestpa".
std::optional<LearnerKind> parse_learner(std::string_view name);

struct ClassifierSpec {
  LearnerKind kind = LearnerKind::c45;
  TreeParams params;
  std::size_t n_trees = 100;  // forests only
  double rho = 1e-4;          // Forest-PA only
};

std::unique_ptr<Classifier> train(const ClassifierSpec& spec, const Dataset& ds, std::span<const std::size_t> rows,
                                  std::uint64_t seed);

struct PipelineSpec {
  std::optional<std::vector<std::size_t>> features;  // nullopt = all features
  std::vector<ClassifierSpec> classifiers;
  std::vector<CombinationRule> rules = {CombinationRule::average_of_probabilities};
  AdrMode adr_mode = AdrMode::exact_class;
};

struct CvResult {
  std::string name;  // learner name or combination rule
  MetricsReport mean;
  ConfusionMatrix confusion;  // summed over every fold of every repeat
  std::vector<MetricsReport> per_repeat;
};

struct CvOutcome {
  std::vector<CvResult> members;    // one per classifier spec, in order
  std::vector<CvResult> ensembles;  // one per rule, in order
};

/// Repeated stratified k-fold cross-validation.
///
/// Repeat r uses folds drawn with seed + r. Every member is trained once per
/// fold and scored alone and inside each ensemble rule on the held-out fold.
/// MBT is the mean wall time of one build; an ensemble's build is the sum of
/// its members'. Throws InputError naming any class with fewer than 2 rows,
/// since such a class is missing from some training split.
CvOutcome cross_validate(const Dataset& ds, const PipelineSpec& pipeline, std::size_t k, std::size_t repeats,
                         std::uint64_t seed);

}  // namespace idsforge
