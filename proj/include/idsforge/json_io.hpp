#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <json.hpp>

#include "idsforge/bat.hpp"
#include "idsforge/dataset.hpp"
#include "idsforge/forest.hpp"
#include "idsforge/metrics.hpp"
#include "idsforge/stats.hpp"

namespace idsforge {

using Json = nlohmann::json;

Json to_json(const FeatureMeta& meta);
FeatureMeta feature_meta_from_json(const Json& j);
Json to_json(const PreprocessReport& report);
Json to_json(const MetricsReport& report);
Json to_json(const ConfusionMatrix& cm);
Json to_json(const FriedmanResult& result);
Json to_json(const NemenyiResult& result);

/// {selected, names, merit, iterations, evaluations, seconds, best_merit_trace}
Json selection_to_json(const SelectionResult& result, const std::vector<FeatureMeta>& features);

/// CSV with a header of predicted class names and one row per true class.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm);

// Versioned model documents. Doubles are written in shortest round-trip form,
// so a loaded model predicts bit-identically to the saved one.
Json model_to_json(const Classifier& model);
std::unique_ptr<Classifier> model_from_json(const Json& j);

}  // namespace idsforge
