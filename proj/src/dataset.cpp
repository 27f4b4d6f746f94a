#include "idsforge/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "idsforge/csv.hpp"
#include "idsforge/error.hpp"
#include "idsforge/json_io.hpp"
#include "idsforge/rng.hpp"

namespace idsforge {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_nonfinite_token(std::string_view token) {
  const std::string t = lower(token);
  return t == "infinity" || t == "-infinity" || t == "+infinity" || t == "nan" || t == "-nan" ||
         t == "inf" || t == "-inf" || t == "+inf";
}

}  // namespace

Dataset::Dataset(std::vector<double> features, std::size_t n_features, std::vector<FeatureMeta> meta,
                 std::vector<ClassIndex> labels, std::vector<std::string> class_names, ClassIndex normal_class,
                 bool normalized)
    : features_(std::move(features)),
      n_features_(n_features),
      meta_(std::move(meta)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      normal_class_(normal_class),
      normalized_(normalized) {
  if (n_features_ == 0) throw InputError("dataset has no feature columns");
  if (features_.size() != labels_.size() * n_features_) {
    throw InvariantError("feature matrix size does not match rows x features");
  }
  if (meta_.size() != n_features_) throw InvariantError("feature metadata length does not match feature count");
  if (class_names_.empty()) throw InputError("dataset has no classes");
  if (normal_class_ >= class_names_.size()) throw InputError("normal class index out of range");
  for (double v : features_) {
    if (!std::isfinite(v)) throw InvariantError("dataset contains a non-finite feature value");
  }
  std::vector<std::size_t> counts(class_names_.size(), 0);
  for (ClassIndex l : labels_) {
    if (l >= class_names_.size()) throw InvariantError("label index out of range");
    ++counts[l];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw InputError("class '" + class_names_[c] + "' has no instances");
  }
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (ClassIndex l : labels_) ++counts[l];
  return counts;
}

Dataset Dataset::select_features(std::span<const std::size_t> features) const {
  if (features.empty()) throw InputError("feature selection is empty");
  std::vector<FeatureMeta> meta;
  meta.reserve(features.size());
  for (std::size_t f : features) {
    if (f >= n_features_) throw InputError("feature index " + std::to_string(f) + " out of range");
    meta.push_back(meta_[f]);
  }
  std::vector<double> values;
  values.reserve(rows() * features.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t f : features) values.push_back(at(r, f));
  }
  return Dataset(std::move(values), features.size(), std::move(meta), labels_, class_names_, normal_class_,
                 normalized_);
}

std::vector<std::size_t> FoldAssignment::test_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] == fold) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] != fold) out.push_back(r);
  }
  return out;
}

RawTable parse_csv(std::istream& in, const ColumnRef& label_column, bool has_header) {
  auto records = csv::read_records(in);
  RawTable table;
  std::size_t first_data = 0;
  if (has_header) {
    if (records.empty()) throw InputError("CSV is empty; expected a header row");
    for (const auto& name : records[0].fields) table.column_names.emplace_back(csv::trim(name));
    first_data = 1;
  } else {
    if (records.empty()) throw InputError("CSV is empty");
    for (std::size_t i = 0; i < records[0].fields.size(); ++i) table.column_names.push_back("col" + std::to_string(i));
  }
  const std::size_t width = table.column_names.size();
  table.cells.reserve(records.size() - first_data);
  for (std::size_t i = first_data; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.fields.size() != width) {
      throw InputError("ragged row at line " + std::to_string(rec.line) + ": " + std::to_string(rec.fields.size()) +
                       " cells, expected " + std::to_string(width));
    }
    table.cells.push_back(std::move(rec.fields));
  }

  if (const auto* name = std::get_if<std::string>(&label_column)) {
    if (!has_header) throw InputError("label column given by name but the CSV has no header");
    auto it = std::find(table.column_names.begin(), table.column_names.end(), csv::trim(*name));
    if (it == table.column_names.end()) throw InputError("label column '" + *name + "' not found in header");
    table.label_column = static_cast<std::size_t>(it - table.column_names.begin());
  } else {
    const std::size_t index = std::get<std::size_t>(label_column);
    if (index >= width) {
      throw InputError("label column index " + std::to_string(index) + " out of range for " +
                       std::to_string(width) + " columns");
    }
    table.label_column = index;
  }
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const ColumnRef& label_column, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_csv(in, label_column, has_header);
}

std::pair<RawTable, PreprocessReport> filter(const RawTable& raw) {
  PreprocessReport report;
  report.rows_in = raw.rows();
  report.rows_out = raw.rows();

  // Duplicate names: keep the first copy. A label column that duplicates an
  // earlier name is always kept.
  std::vector<std::size_t> kept;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < raw.columns(); ++c) {
    const auto& name = raw.column_names[c];
    if (c != raw.label_column && seen.contains(name)) {
      report.dropped_duplicate_features.push_back(name);
      continue;
    }
    seen.insert(name);
    kept.push_back(c);
  }

  RawTable out;
  out.cells.assign(raw.rows(), {});
  std::vector<std::string> column;
  for (std::size_t c : kept) {
    const bool is_label = c == raw.label_column;
    column.clear();
    column.reserve(raw.rows());
    for (const auto& row : raw.cells) {
      std::string cell(csv::trim(row[c]));
      if (!is_label) {
        if (cell.empty()) {
          cell = "0";
          ++report.missing_replaced;
        } else if (is_nonfinite_token(cell)) {
          cell = "0";
          ++report.nonfinite_replaced;
        }
      }
      column.push_back(std::move(cell));
    }
    const bool constant =
        column.empty() || std::all_of(column.begin(), column.end(), [&](const auto& v) { return v == column[0]; });
    if (is_label) {
      if (constant) throw InputError("label column '" + raw.column_names[c] + "' is constant: only one class present");
      out.label_column = out.column_names.size();
    } else if (constant) {
      report.dropped_constant_features.push_back(raw.column_names[c]);
      continue;
    }
    out.column_names.push_back(raw.column_names[c]);
    for (std::size_t r = 0; r < column.size(); ++r) out.cells[r].push_back(std::move(column[r]));
  }
  if (out.columns() < 2) throw InputError("no feature columns remain after filtering");
  return {std::move(out), std::move(report)};
}

Dataset encode(const RawTable& raw, const std::optional<std::string>& normal_class_name) {
  if (raw.rows() == 0) throw InputError("cannot encode an empty table");
  if (raw.label_column >= raw.columns()) throw InputError("label column out of range");
  const std::size_t n = raw.rows();
  const std::size_t d = raw.columns() - 1;
  if (d == 0) throw InputError("table has no feature columns");

  std::vector<double> values(n * d);
  std::vector<FeatureMeta> meta;
  meta.reserve(d);
  std::size_t f = 0;
  for (std::size_t c = 0; c < raw.columns(); ++c) {
    if (c == raw.label_column) continue;
    FeatureMeta fm;
    fm.name = raw.column_names[c];
    std::vector<double> parsed(n);
    bool numeric = true;
    for (std::size_t r = 0; r < n && numeric; ++r) {
      auto v = csv::parse_double(raw.cells[r][c]);
      if (!v) numeric = false;
      else parsed[r] = *v;
    }
    if (!numeric) {
      fm.original_kind = FeatureKind::symbolic;
      std::map<std::string, std::int64_t> codes;
      for (std::size_t r = 0; r < n; ++r) {
        auto [it, inserted] = codes.try_emplace(raw.cells[r][c], static_cast<std::int64_t>(codes.size()));
        parsed[r] = static_cast<double>(it->second);
      }
      fm.symbol_codes = std::move(codes);
    }
    auto [lo, hi] = std::minmax_element(parsed.begin(), parsed.end());
    fm.observed_min = *lo;
    fm.observed_max = *hi;
    for (std::size_t r = 0; r < n; ++r) values[r * d + f] = parsed[r];
    meta.push_back(std::move(fm));
    ++f;
  }

  std::vector<std::string> class_names;
  std::unordered_map<std::string, ClassIndex> class_index;
  std::vector<ClassIndex> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string& token = raw.cells[r][raw.label_column];
    auto [it, inserted] = class_index.try_emplace(token, class_names.size());
    if (inserted) class_names.push_back(token);
    labels[r] = it->second;
  }

  ClassIndex normal = 0;
  if (normal_class_name) {
    auto it = class_index.find(*normal_class_name);
    if (it == class_index.end()) throw InputError("normal class '" + *normal_class_name + "' not present in labels");
    normal = it->second;
  } else {
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      const std::string l = lower(class_names[c]);
      if (l == "normal" || l == "benign") {
        normal = c;
        break;
      }
    }
  }
  return Dataset(std::move(values), d, std::move(meta), std::move(labels), std::move(class_names), normal);
}

Dataset normalize(const Dataset& ds) {
  const std::size_t n = ds.rows();
  const std::size_t d = ds.n_features();
  std::vector<double> lo(d, 0.0), hi(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    lo[f] = hi[f] = n ? ds.at(0, f) : 0.0;
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t f = 0; f < d; ++f) {
      lo[f] = std::min(lo[f], ds.at(r, f));
      hi[f] = std::max(hi[f], ds.at(r, f));
    }
  }
  for (std::size_t f = 0; f < d; ++f) {
    if (!(hi[f] > lo[f])) {
      throw InputError("feature '" + ds.feature_meta()[f].name + "' has max = min; cannot normalize");
    }
  }
  std::vector<double> values(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t f = 0; f < d; ++f) {
      values[r * d + f] = (ds.at(r, f) - lo[f]) / (hi[f] - lo[f]);
    }
  }
  return Dataset(std::move(values), d, ds.feature_meta(), std::vector<ClassIndex>(ds.labels().begin(), ds.labels().end()),
                 ds.class_names(), ds.normal_class(), true);
}

FoldAssignment stratified_folds(std::span<const ClassIndex> labels, std::size_t n_classes, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw InputError("fold count must be at least 2");
  if (k > labels.size()) {
    throw InputError("fold count " + std::to_string(k) + " exceeds row count " + std::to_string(labels.size()));
  }
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= n_classes) throw InputError("label index out of range");
    by_class[labels[r]].push_back(r);
  }
  Rng rng(seed);
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.assignment.assign(labels.size(), 0);
  std::size_t deal = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t r : members) {
      out.assignment[r] = deal;
      deal = (deal + 1) % k;
    }
  }
  return out;
}

FoldAssignment stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  return stratified_folds(ds.labels(), ds.n_classes(), k, seed);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path, const std::filesystem::path& meta_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + csv_path.string() + "'");
  std::vector<std::string> fields;
  for (const auto& m : ds.feature_meta()) fields.push_back(m.name);
  fields.push_back("class");
  csv::write_row(out, fields);
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    fields.clear();
    for (double v : ds.row(r)) fields.push_back(csv::format_double(v));
    fields.push_back(ds.class_names()[ds.label(r)]);
    csv::write_row(out, fields);
  }
  if (!out) throw InputError("failed writing '" + csv_path.string() + "'");

  nlohmann::json meta;
  meta["format"] = "idsforge-dataset";
  meta["version"] = 1;
  meta["rows"] = ds.rows();
  meta["normalized"] = ds.normalized();
  meta["class_names"] = ds.class_names();
  meta["normal_class"] = ds.class_names()[ds.normal_class()];
  meta["features"] = nlohmann::json::array();
  for (const auto& m : ds.feature_meta()) meta["features"].push_back(to_json(m));
  std::ofstream mout(meta_path, std::ios::binary);
  if (!mout) throw InputError("cannot write '" + meta_path.string() + "'");
  mout << meta.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path) {
  std::ifstream min(meta_path, std::ios::binary);
  if (!min) throw InputError("cannot open dataset sidecar '" + meta_path.string() + "'");
  nlohmann::json meta;
  try {
    min >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed dataset sidecar: " + std::string(e.what()));
  }
  if (meta.value("format", "") != "idsforge-dataset") throw InputError("not an idsforge dataset sidecar");

  std::vector<FeatureMeta> features;
  for (const auto& j : meta.at("features")) features.push_back(feature_meta_from_json(j));
  const auto class_names = meta.at("class_names").get<std::vector<std::string>>();
  const auto normal_name = meta.at("normal_class").get<std::string>();
  auto normal_it = std::find(class_names.begin(), class_names.end(), normal_name);
  if (normal_it == class_names.end()) throw InputError("sidecar normal class not among class names");

  RawTable raw = load_csv(csv_path, std::size_t{features.size()}, true);
  if (raw.columns() != features.size() + 1) throw InputError("dataset CSV width does not match its sidecar");
  std::unordered_map<std::string, ClassIndex> class_index;
  for (std::size_t c = 0; c < class_names.size(); ++c) class_index[class_names[c]] = c;

  const std::size_t d = features.size();
  std::vector<double> values(raw.rows() * d);
  std::vector<ClassIndex> labels(raw.rows());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t f = 0; f < d; ++f) {
      auto v = csv::parse_double(raw.cells[r][f]);
      if (!v) throw InputError("non-numeric value at data row " + std::to_string(r + 1) + ", column " + std::to_string(f));
      values[r * d + f] = *v;
    }
    auto it = class_index.find(raw.cells[r][d]);
    if (it == class_index.end()) throw InputError("unknown class '" + raw.cells[r][d] + "' in dataset CSV");
    labels[r] = it->second;
  }
  return Dataset(std::move(values), d, std::move(features), std::move(labels), class_names,
                 static_cast<ClassIndex>(normal_it - class_names.begin()), meta.value("normalized", false));
}

}  // namespace idsforge
