#include "idsforge/cv.hpp"

#include <chrono>

#include "idsforge/error.hpp"
#include "idsforge/kernels.hpp"
#include "idsforge/rng.hpp"

namespace idsforge {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::c45: return "c45";
    case LearnerKind::random_forest: return "rf";
    case LearnerKind::forest_pa: return "forest-pa";
  }
  throw InvariantError("unknown learner kind");
}

std::optional<LearnerKind> parse_learner(std::string_view name) {
  if (name == "c45" || name == "c4.5" || name == "j48") return LearnerKind::c45;
  if (name == "rf" || name == "random-forest") return LearnerKind::random_forest;
  if (name == "forest-pa" || name == "forestpa") return LearnerKind::forest_pa;
  return std::nullopt;
}

std::unique_ptr<Classifier> train(const ClassifierSpec& spec, const Dataset& ds, std::span<const std::size_t> rows,
                                  std::uint64_t seed) {
  switch (spec.kind) {
    case LearnerKind::c45: return std::make_unique<DecisionTree>(c45_fit(ds, rows, spec.params));
    case LearnerKind::random_forest: return std::make_unique<Forest>(rf_fit(ds, rows, spec.n_trees, spec.params, seed));
    case LearnerKind::forest_pa:
      return std::make_unique<Forest>(forest_pa_fit(ds, rows, spec.n_trees, spec.params, spec.rho, seed));
  }
  throw InvariantError("unknown learner kind");
}

namespace {

struct Tally {
  ConfusionMatrix repeat_cm;
  ConfusionMatrix total_cm;
  double build_seconds = 0.0;
  std::size_t builds = 0;
  std::vector<MetricsReport> per_repeat;
};

CvResult finish(std::string name, Tally& tally) {
  return CvResult{std::move(name), mean_report(tally.per_repeat), tally.total_cm, tally.per_repeat};
}

}  // namespace

CvOutcome cross_validate(const Dataset& full, const PipelineSpec& pipeline, std::size_t k, std::size_t repeats,
                         std::uint64_t seed) {
  if (k < 2) throw InputError("fold count must be at least 2");
  if (repeats < 1) throw InputError("repeat count must be at least 1");
  if (pipeline.classifiers.empty()) throw InputError("at least one classifier is required");
  if (pipeline.rules.empty()) throw InputError("at least one combination rule is required");

  const Dataset ds = pipeline.features ? full.select_features(*pipeline.features) : full;
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 2) {
      throw InputError("class '" + ds.class_names()[c] + "' has " + std::to_string(counts[c]) +
                       " instance(s); it would be absent from a training split");
    }
  }

  const auto& names = ds.class_names();
  const std::size_t m = pipeline.classifiers.size();
  std::vector<Tally> members(m, Tally{ConfusionMatrix(names), ConfusionMatrix(names), 0.0, 0, {}});
  std::vector<Tally> ensembles(pipeline.rules.size(),
                               Tally{ConfusionMatrix(names), ConfusionMatrix(names), 0.0, 0, {}});

  for (std::size_t r = 0; r < repeats; ++r) {
    const auto folds = stratified_folds(ds, k, seed + r);
    for (auto& t : members) t.repeat_cm = ConfusionMatrix(names);
    for (auto& t : ensembles) t.repeat_cm = ConfusionMatrix(names);
    double ensemble_seconds = 0.0;

    for (std::size_t f = 0; f < k; ++f) {
      const auto train_rows = folds.train_rows(f);
      const auto test_rows = folds.test_rows(f);
      std::vector<std::vector<ClassDistribution>> predictions(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t model_seed = Rng::mix(seed ^ Rng::mix((r * k + f) * 64 + i));
        const auto start = std::chrono::steady_clock::now();
        auto model = train(pipeline.classifiers[i], ds, train_rows, model_seed);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        members[i].build_seconds += secs;
        ++members[i].builds;
        ensemble_seconds += secs;
        predictions[i] = kernels::predict_batch(*model, ds, test_rows);
        for (std::size_t q = 0; q < test_rows.size(); ++q) {
          members[i].repeat_cm.add(ds.label(test_rows[q]), predictions[i][q].argmax());
        }
      }
      std::vector<ClassDistribution> row_dists(m);
      for (std::size_t e = 0; e < ensembles.size(); ++e) {
        for (std::size_t q = 0; q < test_rows.size(); ++q) {
          for (std::size_t i = 0; i < m; ++i) row_dists[i] = predictions[i][q];
          ensembles[e].repeat_cm.add(ds.label(test_rows[q]), combine(row_dists, pipeline.rules[e]).label);
        }
      }
    }

    auto close_repeat = [&](Tally& t, double mbt) {
      if (t.repeat_cm.total() != ds.rows()) throw InvariantError("fold predictions do not cover every row once");
      auto report = compute_metrics(t.repeat_cm, ds.normal_class(), pipeline.adr_mode);
      report.mbt_seconds = mbt;
      t.per_repeat.push_back(std::move(report));
      t.total_cm += t.repeat_cm;
    };
    for (auto& t : members) {
      close_repeat(t, t.build_seconds / static_cast<double>(t.builds));
      t.build_seconds = 0.0;
      t.builds = 0;
    }
    for (auto& t : ensembles) close_repeat(t, ensemble_seconds / static_cast<double>(k));
  }

  CvOutcome out;
  for (std::size_t i = 0; i < m; ++i) out.members.push_back(finish(std::string(to_string(pipeline.classifiers[i].kind)), members[i]));
  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    out.ensembles.push_back(finish(std::string(to_string(pipeline.rules[e])), ensembles[e]));
  }
  return out;
}

}  // namespace idsforge
