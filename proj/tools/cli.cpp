#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "idsforge/bat.hpp"
#include "idsforge/csv.hpp"
#include "idsforge/cv.hpp"
#include "idsforge/dataset.hpp"
#include "idsforge/error.hpp"
#include "idsforge/featsel.hpp"
#include "idsforge/json_io.hpp"
#include "idsforge/parallel.hpp"
#include "idsforge/stats.hpp"

#ifndef IDSFORGE_VERSION
#define IDSFORGE_VERSION "0.0.0"
#endif

namespace idsforge::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string input;
  std::string out;
  int threads = 0;
  std::string config;
};

struct SelectorOptions {
  std::string selector = "cfs-ba";
  std::size_t top = 10;
  std::string features;
  std::string subset_file;
  BatSwarmConfig bat;
};

struct PreprocessOptions {
  std::string label_column;
  std::string normal_class;
  bool no_header = false;
};

struct EvaluateOptions {
  std::string classifiers = "c45,rf,forest-pa";
  std::string rule = "average-of-probabilities";
  std::size_t k = 10;
  std::size_t repeats = 1;
  std::uint64_t seed = 1;
  std::size_t trees = 100;
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;
  double min_gain = 1e-6;
  double rho = 1e-4;
  std::string adr_mode = "exact";
};

struct StatsOptions {
  bool ranks = false;
  bool mean_ranks = false;
  std::size_t datasets = 0;
  bool lower_is_better = false;
  std::vector<double> alphas = kDefaultAlphas;
};

struct Selection {
  std::vector<std::size_t> indices;
  Json detail;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string current;
  auto flush = [&] {
    const auto t = csv::trim(current);
    if (!t.empty()) items.emplace_back(t);
    current.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      flush();
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return items;
}

std::optional<std::size_t> parse_index(std::string_view token) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  std::size_t v = 0;
  for (char c : token) v = v * 10 + static_cast<std::size_t>(c - '0');
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

Dataset load_prepared(const std::string& input) {
  const fs::path csv_path(input);
  const fs::path meta = sidecar_path(csv_path);
  if (!fs::exists(meta)) {
    throw InputError("no metadata sidecar '" + meta.string() + "'; run 'idsforge preprocess' first");
  }
  return read_dataset(csv_path, meta);
}

void apply_threads(const CommonOptions& common) {
  const int threads = common.threads > 0 ? common.threads : default_thread_count();
  set_thread_count(threads);
}

std::vector<std::size_t> resolve_features(const Dataset& ds, const std::vector<std::string>& tokens) {
  std::vector<std::size_t> indices;
  std::set<std::size_t> seen;
  const auto& meta = ds.feature_meta();
  for (const auto& token : tokens) {
    std::optional<std::size_t> index;
    const auto by_name = std::find_if(meta.begin(), meta.end(), [&](const FeatureMeta& m) { return m.name == token; });
    if (by_name != meta.end()) {
      index = static_cast<std::size_t>(by_name - meta.begin());
    } else {
      index = parse_index(token);
    }
    if (!index) throw InputError("unknown feature '" + token + "'");
    if (*index >= ds.n_features()) {
      throw InputError("feature index " + token + " out of range for " + std::to_string(ds.n_features()) +
                       " features");
    }
    if (!seen.insert(*index).second) throw InputError("feature '" + token + "' listed twice");
    indices.push_back(*index);
  }
  if (indices.empty()) throw InputError("feature list is empty");
  return indices;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json names_of(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Json names = Json::array();
  for (std::size_t i : indices) names.push_back(ds.feature_meta()[i].name);
  return names;
}

Selection run_selection(const Dataset& ds, const SelectorOptions& opt) {
  const std::string& s = opt.selector;
  Selection sel;
  if (s == "cfs-ba") {
    const auto result = cfs_ba_select(ds, opt.bat);
    sel.indices = result.subset.indices();
    sel.detail = selection_to_json(result, ds.feature_meta());
    sel.detail["selector"] = s;
    sel.detail["config"] = Json{{"bats", opt.bat.n_bats},         {"iterations", opt.bat.max_iterations},
                                {"f_min", opt.bat.f_min},         {"f_max", opt.bat.f_max},
                                {"alpha", opt.bat.alpha},         {"gamma", opt.bat.gamma},
                                {"seed", opt.bat.seed},           {"bins", opt.bat.bins}};
    return sel;
  }

  const auto start = std::chrono::steady_clock::now();
  Json scores = Json::array();
  if (s == "ig" || s == "igr") {
    if (opt.top == 0) throw InputError("--top must be at least 1");
    if (opt.top > ds.n_features()) {
      throw InputError("--top " + std::to_string(opt.top) + " exceeds the " + std::to_string(ds.n_features()) +
                       " available features");
    }
    const auto ranked = s == "ig" ? ig_rank(ds, opt.bat.bins) : igr_rank(ds, opt.bat.bins);
    for (std::size_t i = 0; i < opt.top; ++i) {
      sel.indices.push_back(ranked[i].index);
      scores.push_back(ranked[i].score);
    }
  } else if (s == "none") {
    for (std::size_t i = 0; i < ds.n_features(); ++i) sel.indices.push_back(i);
  } else if (s == "list") {
    if (opt.features.empty() == opt.subset_file.empty()) {
      throw InputError("selector 'list' needs exactly one of --features or --subset");
    }
    const std::string text = opt.features.empty() ? read_file(opt.subset_file) : opt.features;
    sel.indices = resolve_features(ds, split_list(text));
  } else {
    throw InputError("unknown selector '" + s + "' (expected cfs-ba, ig, igr, none or list)");
  }

  const auto cache = build_correlation_cache(ds, opt.bat.bins);
  const double merit = cfs_merit(FeatureSubset::from_indices(ds.n_features(), sel.indices), cache);
  sel.detail = Json{{"selector", s},
                    {"selected", sel.indices},
                    {"names", names_of(ds, sel.indices)},
                    {"merit", merit},
                    {"iterations", 0},
                    {"evaluations", 0},
                    {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  if (!scores.empty()) sel.detail["scores"] = scores;
  return sel;
}

std::string index_list(const std::vector<std::size_t>& indices) {
  std::string text;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) text += ',';
    text += std::to_string(indices[i]);
  }
  return text + '\n';
}

void add_common(CLI::App* cmd, CommonOptions& common, bool out_required = true) {
  cmd->add_option("--input,-i", common.input, "Input CSV file")->required();
  auto* out = cmd->add_option("--out,-o", common.out, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--threads", common.threads, "Worker threads (default: IDSFORGE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--config", common.config, "Flat key = value config file; flags override it");
}

void add_selector(CLI::App* cmd, SelectorOptions& sel) {
  cmd->add_option("--selector", sel.selector, "cfs-ba, ig, igr, none or list")
      ->check(CLI::IsMember({"cfs-ba", "ig", "igr", "none", "list"}));
  cmd->add_option("--top", sel.top, "Features kept by ig/igr");
  cmd->add_option("--features", sel.features, "Comma list of feature indices or names for 'list'");
  cmd->add_option("--subset", sel.subset_file, "Index list file (subset.txt) for 'list'");
  cmd->add_option("--bats", sel.bat.n_bats, "Bat population size");
  cmd->add_option("--iterations", sel.bat.max_iterations, "Bat iterations");
  cmd->add_option("--f-min", sel.bat.f_min, "Minimum pulse frequency");
  cmd->add_option("--f-max", sel.bat.f_max, "Maximum pulse frequency");
  cmd->add_option("--loudness-decay", sel.bat.alpha, "Loudness decay alpha");
  cmd->add_option("--pulse-growth", sel.bat.gamma, "Pulse rate growth gamma");
  cmd->add_option("--bins", sel.bat.bins, "Discretization bins for correlations");
}

int cmd_preprocess(const CommonOptions& common, const PreprocessOptions& opt, std::ostream& out) {
  apply_threads(common);
  RawTable raw = load_csv(common.input, std::size_t{0}, !opt.no_header);
  if (opt.label_column.empty()) {
    raw.label_column = raw.columns() - 1;
  } else {
    const auto it = std::find(raw.column_names.begin(), raw.column_names.end(), opt.label_column);
    if (!opt.no_header && it != raw.column_names.end()) {
      raw.label_column = static_cast<std::size_t>(it - raw.column_names.begin());
    } else if (const auto index = parse_index(opt.label_column)) {
      if (*index >= raw.columns()) {
        throw InputError("label column index " + opt.label_column + " out of range for " +
                         std::to_string(raw.columns()) + " columns");
      }
      raw.label_column = *index;
    } else {
      throw InputError("label column '" + opt.label_column + "' not found");
    }
  }
  auto [filtered, report] = filter(raw);
  const std::optional<std::string> normal =
      opt.normal_class.empty() ? std::nullopt : std::optional<std::string>(opt.normal_class);
  const Dataset ds = normalize(encode(filtered, normal));

  const fs::path dir = prepare_out_dir(common.out);
  write_dataset(ds, dir / "dataset.csv", dir / "dataset.json");
  Json j = to_json(report);
  j["classes"] = ds.class_names();
  j["class_counts"] = ds.class_counts();
  j["normal_class"] = ds.class_names()[ds.normal_class()];
  j["features"] = ds.n_features();
  write_text(dir / "preprocess_report.json", j.dump(2) + "\n");

  out << "rows " << ds.rows() << ", features " << ds.n_features() << ", classes " << ds.n_classes()
      << " (normal: " << ds.class_names()[ds.normal_class()] << ")\n";
  if (!report.dropped_constant_features.empty()) {
    out << "dropped " << report.dropped_constant_features.size() << " constant feature(s)\n";
  }
  out << "wrote " << (dir / "dataset.csv").string() << "\n";
  return 0;
}

int cmd_select(const CommonOptions& common, SelectorOptions sel, std::uint64_t seed, std::ostream& out) {
  apply_threads(common);
  sel.bat.seed = seed;
  const Dataset ds = load_prepared(common.input);
  const Selection s = run_selection(ds, sel);

  const fs::path dir = prepare_out_dir(common.out);
  write_text(dir / "subset.json", s.detail.dump(2) + "\n");
  write_text(dir / "subset.txt", index_list(s.indices));

  out << s.indices.size() << " of " << ds.n_features() << " features selected, merit "
      << csv::format_double(s.detail.at("merit").get<double>()) << "\n";
  for (std::size_t i : s.indices) out << "  " << i << " " << ds.feature_meta()[i].name << "\n";
  return 0;
}

Json result_json(const CvResult& r) {
  Json per_repeat = Json::array();
  for (const auto& m : r.per_repeat) per_repeat.push_back(to_json(m));
  return Json{{"name", r.name}, {"metrics", to_json(r.mean)}, {"per_repeat", per_repeat}, {"confusion", to_json(r.confusion)}};
}

void write_confusion(const fs::path& path, const ConfusionMatrix& cm) {
  std::ostringstream ss;
  write_confusion_csv(ss, cm);
  write_text(path, ss.str());
}

int cmd_evaluate(const CommonOptions& common, SelectorOptions sel, const EvaluateOptions& opt, std::ostream& out) {
  const std::string started = utc_timestamp();
  const auto wall_start = std::chrono::steady_clock::now();
  apply_threads(common);
  if (opt.k < 2) throw InputError("--k must be at least 2");
  if (opt.repeats < 1) throw InputError("--repeats must be at least 1");
  if (opt.trees < 1) throw InputError("--trees must be at least 1");

  PipelineSpec pipeline;
  TreeParams params;
  params.min_leaf = opt.min_leaf;
  params.min_gain = opt.min_gain;
  if (opt.max_depth > 0) params.max_depth = opt.max_depth;
  for (const auto& name : split_list(opt.classifiers)) {
    const auto kind = parse_learner(name);
    if (!kind) throw InputError("unknown classifier '" + name + "' (expected c45, rf or forest-pa)");
    pipeline.classifiers.push_back(ClassifierSpec{*kind, params, opt.trees, opt.rho});
  }
  if (pipeline.classifiers.empty()) throw InputError("--classifiers is empty");
  pipeline.rules.clear();
  if (opt.rule == "all") {
    pipeline.rules.assign(kAllRules.begin(), kAllRules.end());
  } else {
    for (const auto& name : split_list(opt.rule)) {
      const auto rule = parse_rule(name);
      if (!rule) throw InputError("unknown combination rule '" + name + "'");
      pipeline.rules.push_back(*rule);
    }
  }
  if (pipeline.rules.empty()) throw InputError("--rule is empty");
  if (opt.adr_mode == "exact") {
    pipeline.adr_mode = AdrMode::exact_class;
  } else if (opt.adr_mode == "binary") {
    pipeline.adr_mode = AdrMode::binary;
  } else {
    throw InputError("unknown ADR mode '" + opt.adr_mode + "' (expected exact or binary)");
  }

  const Dataset ds = load_prepared(common.input);
  sel.bat.seed = opt.seed;
  const Selection s = run_selection(ds, sel);
  if (sel.selector != "none") pipeline.features = s.indices;

  const CvOutcome outcome = cross_validate(ds, pipeline, opt.k, opt.repeats, opt.seed);

  Json config{{"input", common.input},         {"selector", sel.selector},       {"top", sel.top},
              {"features", sel.features},      {"subset", sel.subset_file},      {"classifiers", opt.classifiers},
              {"rule", opt.rule},              {"k", opt.k},                     {"repeats", opt.repeats},
              {"seed", opt.seed},              {"trees", opt.trees},             {"min_leaf", opt.min_leaf},
              {"min_gain", opt.min_gain},      {"rho", opt.rho},                 {"adr_mode", opt.adr_mode},
              {"bats", sel.bat.n_bats},        {"iterations", sel.bat.max_iterations},
              {"f_min", sel.bat.f_min},        {"f_max", sel.bat.f_max},         {"loudness_decay", sel.bat.alpha},
              {"pulse_growth", sel.bat.gamma}, {"bins", sel.bat.bins}};
  config["max_depth"] = opt.max_depth > 0 ? Json(opt.max_depth) : Json(nullptr);

  const fs::path dir = prepare_out_dir(common.out);
  Json classifiers = Json::array();
  std::map<std::string, int> used;
  for (const auto& r : outcome.members) {
    const int n = ++used[r.name];
    const std::string tag = n == 1 ? r.name : r.name + "-" + std::to_string(n);
    Json j = result_json(r);
    j["name"] = tag;
    classifiers.push_back(std::move(j));
    write_confusion(dir / ("confusion_" + tag + ".csv"), r.confusion);
  }
  Json ensembles = Json::array();
  for (const auto& r : outcome.ensembles) {
    Json j = result_json(r);
    j["rule"] = r.name;
    j["name"] = "ensemble";
    ensembles.push_back(std::move(j));
    write_confusion(dir / ("confusion_ensemble_" + r.name + ".csv"), r.confusion);
  }

  Json report{{"tool", "idsforge"},
              {"version", IDSFORGE_VERSION},
              {"config", config},
              {"dataset",
               Json{{"rows", ds.rows()},
                    {"features", ds.n_features()},
                    {"classes", ds.class_names()},
                    {"normal_class", ds.class_names()[ds.normal_class()]}}},
              {"selection", s.detail},
              {"classifiers", classifiers},
              {"ensembles", ensembles},
              {"started_at", started},
              {"finished_at", utc_timestamp()},
              {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count()}};
  write_text(dir / "report.json", report.dump(2) + "\n");

  auto line = [&](const std::string& name, const MetricsReport& m) {
    out << name << ": accuracy " << csv::format_double(m.accuracy) << ", f-measure " << csv::format_double(m.f_measure_w)
        << ", adr " << csv::format_double(m.adr) << ", far " << csv::format_double(m.far) << "\n";
  };
  out << "features used: " << (pipeline.features ? pipeline.features->size() : ds.n_features()) << "\n";
  for (std::size_t i = 0; i < outcome.members.size(); ++i) line(classifiers[i]["name"].get<std::string>(), outcome.members[i].mean);
  for (const auto& r : outcome.ensembles) line("ensemble (" + r.name + ")", r.mean);
  return 0;
}

int cmd_stats(const CommonOptions& common, const StatsOptions& opt, std::ostream& out) {
  const MetricTable table = read_metric_table(common.input);
  if (table.k() < 2) throw InputError("need at least 2 algorithms");
  for (double a : opt.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("alpha must lie in (0, 1)");
  }

  FriedmanResult friedman;
  std::size_t n = 0;
  Json j{{"algorithms", table.algorithms}};
  if (opt.mean_ranks) {
    if (table.n() != 1) throw InputError("--mean-ranks expects exactly one row of mean ranks");
    if (opt.datasets < 2) throw InputError("--mean-ranks needs --datasets of at least 2");
    n = opt.datasets;
    std::vector<double> means(table.values.begin(), table.values.end());
    friedman = friedman_from_mean_ranks(means, n, opt.alphas);
    j["mode"] = "mean-ranks";
  } else {
    if (table.n() < 2) throw InputError("need at least 2 datasets");
    const RankTable ranks = opt.ranks ? ranks_as_given(table) : rank_algorithms(table, !opt.lower_is_better);
    n = ranks.n();
    friedman = friedman_test(ranks, opt.alphas);
    j["mode"] = opt.ranks ? "ranks" : (opt.lower_is_better ? "lower-is-better" : "higher-is-better");
    j["datasets"] = table.datasets;
    Json rows = Json::array();
    for (std::size_t i = 0; i < ranks.n(); ++i) {
      rows.push_back(std::vector<double>(ranks.ranks.begin() + static_cast<std::ptrdiff_t>(i * ranks.k()),
                                         ranks.ranks.begin() + static_cast<std::ptrdiff_t>((i + 1) * ranks.k())));
    }
    j["ranks"] = rows;
  }
  j["n"] = n;
  j["friedman"] = to_json(friedman);

  std::vector<NemenyiResult> posthoc;
  Json nemenyi_json = Json::array();
  for (double a : opt.alphas) {
    if (table.k() > 10 || (a != 0.05 && a != 0.1)) continue;
    posthoc.push_back(nemenyi(friedman.mean_ranks, table.algorithms, n, a));
    nemenyi_json.push_back(to_json(posthoc.back()));
  }
  j["nemenyi"] = nemenyi_json;

  const fs::path dir = prepare_out_dir(common.out);
  write_text(dir / "stats.json", j.dump(2) + "\n");
  const std::string summary = cd_summary(friedman.mean_ranks, table.algorithms, posthoc);
  write_text(dir / "cd.txt", summary);

  out << "chi2_F " << csv::format_double(friedman.chi2_f) << ", F "
      << (std::isinf(friedman.f_statistic) ? std::string("inf") : csv::format_double(friedman.f_statistic)) << ", p "
      << csv::format_double(friedman.p_value) << "\n";
  out << summary;
  return 0;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin() + 2, args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Config values go in front of the user's own arguments, and only for flags
// the user did not pass.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App* cmd) {
  const auto path = find_config_path(args);
  if (!path) return args;
  std::vector<std::string> merged(args.begin(), args.begin() + 2);
  for (const auto& [key, value] : read_config(*path)) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (opt == nullptr || key == "config") throw InputError("unknown config key '" + key + "' in " + *path);
    if (given_on_command_line(args, flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") {
        merged.push_back(flag);
      } else if (value != "false" && value != "0" && value != "no") {
        throw InputError("config key '" + key + "' expects true or false");
      }
    } else {
      merged.push_back(flag);
      merged.push_back(value);
    }
  }
  merged.insert(merged.end(), args.begin() + 2, args.end());
  return merged;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key(csv::trim(t.substr(0, eq)));
    std::string value(csv::trim(t.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw InputError(path + ":" + std::to_string(number) + ": empty key");
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intrusion-detection pipeline: feature selection, tree ensembles and evaluation", "idsforge"};
  app.set_version_flag("--version", IDSFORGE_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  SelectorOptions sel;
  PreprocessOptions pre;
  EvaluateOptions eval;
  StatsOptions stats;
  std::uint64_t select_seed = 1;

  auto* preprocess = app.add_subcommand("preprocess", "Clean, encode and normalize a raw CSV");
  add_common(preprocess, common);
  preprocess->add_option("--label-column", pre.label_column, "Label column name or 0-based index (default: last)");
  preprocess->add_option("--normal-class", pre.normal_class, "Name of the benign class");
  preprocess->add_flag("--no-header", pre.no_header, "Input has no header row");

  auto* select = app.add_subcommand("select", "Choose a feature subset");
  add_common(select, common);
  add_selector(select, sel);
  select->add_option("--seed", select_seed, "Random seed");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate classifiers and their vote ensemble");
  add_common(evaluate, common);
  add_selector(evaluate, sel);
  evaluate->get_option("--selector")->description("cfs-ba, ig, igr, none or list (default: none)");
  evaluate->add_option("--classifiers", eval.classifiers, "Comma list of c45, rf, forest-pa");
  evaluate->add_option("--rule", eval.rule, "Combination rule, comma list of rules, or 'all'");
  evaluate->add_option("--k", eval.k, "Folds");
  evaluate->add_option("--repeats", eval.repeats, "Repetitions of k-fold CV");
  evaluate->add_option("--seed", eval.seed, "Random seed");
  evaluate->add_option("--trees", eval.trees, "Trees per forest");
  evaluate->add_option("--min-leaf", eval.min_leaf, "Minimum rows per leaf");
  evaluate->add_option("--max-depth", eval.max_depth, "Maximum tree depth (0: unlimited)");
  evaluate->add_option("--min-gain", eval.min_gain, "Minimum gain ratio for a split");
  evaluate->add_option("--rho", eval.rho, "Forest-PA weight constant");
  evaluate->add_option("--adr-mode", eval.adr_mode, "exact or binary attack detection");

  auto* stats_cmd = app.add_subcommand("stats", "Friedman and Nemenyi tests over a metric table");
  add_common(stats_cmd, common);
  stats_cmd->add_flag("--ranks", stats.ranks, "Table already holds ranks");
  stats_cmd->add_flag("--mean-ranks", stats.mean_ranks, "Table is one row of mean ranks (needs --datasets)");
  stats_cmd->add_option("--datasets", stats.datasets, "Dataset count behind --mean-ranks");
  stats_cmd->add_flag("--lower-is-better", stats.lower_is_better, "Smaller values rank first");
  stats_cmd->add_option("--alpha", stats.alphas, "Significance levels")->delimiter(',');

  try {
    std::vector<std::string> effective = args;
    if (args.size() >= 2) {
      if (auto* cmd = app.get_subcommand_no_throw(args[1])) effective = merge_config(args, cmd);
    }
    std::vector<std::string> rest(effective.rbegin(), effective.rend() - 1);
    try {
      app.parse(rest);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
    }
    if (preprocess->parsed()) return cmd_preprocess(common, pre, out);
    if (select->parsed()) return cmd_select(common, sel, select_seed, out);
    if (evaluate->parsed()) {
      if (evaluate->get_option("--selector")->count() == 0) sel.selector = "none";
      return cmd_evaluate(common, sel, eval, out);
    }
    if (stats_cmd->parsed()) return cmd_stats(common, stats, out);
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace idsforge::cli
