#include "idsforge/json_io.hpp"

#include <cmath>
#include <ostream>

#include "idsforge/csv.hpp"
#include "idsforge/error.hpp"

namespace idsforge {

namespace {

constexpr int kModelVersion = 1;

// JSON has no infinity; such values are written as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const FeatureMeta& meta) {
  Json j;
  j["name"] = meta.name;
  j["kind"] = meta.original_kind == FeatureKind::numeric ? "numeric" : "symbolic";
  j["observed_min"] = meta.observed_min;
  j["observed_max"] = meta.observed_max;
  if (meta.symbol_codes) {
    // Listed in code order so the mapping reads in first-appearance order.
    std::vector<std::string> by_code(meta.symbol_codes->size());
    for (const auto& [symbol, code] : *meta.symbol_codes) by_code.at(static_cast<std::size_t>(code)) = symbol;
    j["symbols"] = by_code;
  }
  return j;
}

FeatureMeta feature_meta_from_json(const Json& j) {
  try {
    FeatureMeta m;
    m.name = j.at("name").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "numeric" && kind != "symbolic") throw InputError("unknown feature kind '" + kind + "'");
    m.original_kind = kind == "numeric" ? FeatureKind::numeric : FeatureKind::symbolic;
    m.observed_min = j.at("observed_min").get<double>();
    m.observed_max = j.at("observed_max").get<double>();
    if (j.contains("symbols")) {
      std::map<std::string, std::int64_t> codes;
      const auto symbols = j.at("symbols").get<std::vector<std::string>>();
      for (std::size_t i = 0; i < symbols.size(); ++i) codes[symbols[i]] = static_cast<std::int64_t>(i);
      m.symbol_codes = std::move(codes);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed feature metadata: ") + e.what());
  }
}

Json to_json(const PreprocessReport& report) {
  return Json{{"dropped_constant_features", report.dropped_constant_features},
              {"dropped_duplicate_features", report.dropped_duplicate_features},
              {"missing_replaced", report.missing_replaced},
              {"nonfinite_replaced", report.nonfinite_replaced},
              {"rows_in", report.rows_in},
              {"rows_out", report.rows_out}};
}

Json to_json(const MetricsReport& report) {
  return Json{{"accuracy", report.accuracy},       {"precision", report.precision_w},
              {"detection_rate", report.dr_w},     {"f_measure", report.f_measure_w},
              {"adr", report.adr},                 {"far", report.far},
              {"mbt_seconds", report.mbt_seconds}, {"unpredicted_classes", report.unpredicted_classes}};
}

Json to_json(const ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (std::size_t t = 0; t < cm.n_classes(); ++t) {
    Json row = Json::array();
    for (std::size_t p = 0; p < cm.n_classes(); ++p) row.push_back(cm.at(t, p));
    rows.push_back(std::move(row));
  }
  return Json{{"classes", cm.class_names()}, {"counts", std::move(rows)}};
}

Json to_json(const FriedmanResult& result) {
  Json reject = Json::object();
  for (const auto& [alpha, rejected] : result.reject_at) reject[csv::format_double(alpha)] = rejected;
  return Json{{"mean_ranks", result.mean_ranks},
              {"chi2_f", result.chi2_f},
              {"f_statistic", finite_or_null(result.f_statistic)},
              {"f_statistic_infinite", std::isinf(result.f_statistic)},
              {"df1", result.df1},
              {"df2", result.df2},
              {"p_value", result.p_value},
              {"reject_at", std::move(reject)}};
}

Json to_json(const NemenyiResult& result) {
  Json pairs = Json::array();
  for (const auto& p : result.significant_pairs) {
    pairs.push_back(Json{{"first", p.first}, {"second", p.second}, {"rank_difference", p.rank_difference}});
  }
  return Json{{"alpha", result.alpha}, {"q_alpha", result.q_alpha}, {"cd", result.cd}, {"significant_pairs", pairs}};
}

Json selection_to_json(const SelectionResult& result, const std::vector<FeatureMeta>& features) {
  const auto selected = result.subset.indices();
  std::vector<std::string> names;
  for (std::size_t i : selected) names.push_back(i < features.size() ? features[i].name : std::to_string(i));
  return Json{{"selected", selected},
              {"names", names},
              {"merit", result.merit},
              {"iterations", result.trace.iterations},
              {"evaluations", result.trace.evaluations},
              {"seconds", result.trace.seconds},
              {"best_merit_trace", result.trace.best_merit}};
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
  std::vector<std::string> fields{"true\\predicted"};
  fields.insert(fields.end(), cm.class_names().begin(), cm.class_names().end());
  csv::write_row(out, fields);
  for (std::size_t t = 0; t < cm.n_classes(); ++t) {
    fields.assign(1, cm.class_names()[t]);
    for (std::size_t p = 0; p < cm.n_classes(); ++p) fields.push_back(std::to_string(cm.at(t, p)));
    csv::write_row(out, fields);
  }
}

namespace {

Json tree_to_json(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    Json j{{"depth", n.depth}, {"n", n.n_train}};
    if (n.is_leaf()) {
      j["dist"] = n.distribution.probs;
    } else {
      j["feature"] = n.feature;
      j["threshold"] = n.threshold;
      j["left"] = n.left;
      j["right"] = n.right;
    }
    nodes.push_back(std::move(j));
  }
  Json params{{"min_leaf", tree.params().min_leaf}, {"min_gain", tree.params().min_gain}};
  params["max_depth"] = tree.params().max_depth ? Json(*tree.params().max_depth) : Json(nullptr);
  return Json{{"n_features", tree.n_features()}, {"n_classes", tree.n_classes()}, {"params", params}, {"nodes", nodes}};
}

DecisionTree tree_from_json(const Json& j) {
  TreeParams params;
  const auto& p = j.at("params");
  params.min_leaf = p.at("min_leaf").get<std::size_t>();
  params.min_gain = p.at("min_gain").get<double>();
  if (!p.at("max_depth").is_null()) params.max_depth = p.at("max_depth").get<std::size_t>();
  std::vector<TreeNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    TreeNode n;
    n.depth = jn.at("depth").get<std::uint32_t>();
    n.n_train = jn.at("n").get<std::uint32_t>();
    if (jn.contains("dist")) {
      n.distribution = ClassDistribution(jn.at("dist").get<std::vector<double>>());
    } else {
      n.feature = jn.at("feature").get<std::int32_t>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<std::int32_t>();
      n.right = jn.at("right").get<std::int32_t>();
    }
    nodes.push_back(std::move(n));
  }
  return DecisionTree(std::move(nodes), j.at("n_features").get<std::size_t>(), j.at("n_classes").get<std::size_t>(),
                      params);
}

}  // namespace

Json model_to_json(const Classifier& model) {
  Json doc{{"format", "idsforge-model"}, {"version", kModelVersion}};
  if (const auto* tree = dynamic_cast<const DecisionTree*>(&model)) {
    doc["kind"] = "c45";
    doc["trees"] = Json::array({tree_to_json(*tree)});
    return doc;
  }
  if (const auto* forest = dynamic_cast<const Forest*>(&model)) {
    doc["kind"] = forest->kind() == ForestKind::random_forest ? "random_forest" : "forest_pa";
    doc["bootstrap_seeds"] = forest->bootstrap_seeds();
    doc["oob_error"] = forest->oob_error() ? Json(*forest->oob_error()) : Json(nullptr);
    doc["subspace_size"] = forest->subspace_size();
    doc["trees"] = Json::array();
    for (const auto& t : forest->trees()) doc["trees"].push_back(tree_to_json(t));
    return doc;
  }
  throw InputError("only trees and forests can be serialized");
}

std::unique_ptr<Classifier> model_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "idsforge-model") throw InputError("not an idsforge model document");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion) throw InputError("unsupported model version " + std::to_string(version));
    const auto kind = j.at("kind").get<std::string>();
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) trees.push_back(tree_from_json(jt));
    if (trees.empty()) throw InputError("model has no trees");
    if (kind == "c45") {
      if (trees.size() != 1) throw InputError("c45 model must hold exactly one tree");
      return std::make_unique<DecisionTree>(std::move(trees.front()));
    }
    if (kind != "random_forest" && kind != "forest_pa") throw InputError("unknown model kind '" + kind + "'");
    std::optional<double> oob;
    if (!j.at("oob_error").is_null()) oob = j.at("oob_error").get<double>();
    return std::make_unique<Forest>(std::move(trees),
                                    kind == "random_forest" ? ForestKind::random_forest : ForestKind::forest_pa,
                                    j.at("bootstrap_seeds").get<std::vector<std::uint64_t>>(), oob,
                                    j.at("subspace_size").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace idsforge
