#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace idsforge {

using ClassIndex = std::size_t;

/// Label column given either by header name or zero-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

/// Untyped CSV contents. Every row has exactly `columns()` cells.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> cells;
  std::size_t label_column = 0;

  std::size_t rows() const { return cells.size(); }
  std::size_t columns() const { return column_names.size(); }
};

enum class FeatureKind { numeric, symbolic };

struct FeatureMeta {
  std::string name;
  FeatureKind original_kind = FeatureKind::numeric;
  double observed_min = 0.0;
  double observed_max = 0.0;
  // Present for symbolic columns; codes are assigned in first-appearance order.
  std::optional<std::map<std::string, std::int64_t>> symbol_codes;
};

struct PreprocessReport {
  std::vector<std::string> dropped_constant_features;
  std::vector<std::string> dropped_duplicate_features;
  std::size_t missing_replaced = 0;
  std::size_t nonfinite_replaced = 0;
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
};

/// Immutable numeric dataset: a row-major feature matrix plus class labels.
///
/// The constructor checks that every value is finite, every label indexes
/// `class_names`, and every class has at least one instance.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::size_t n_features, std::vector<FeatureMeta> meta,
          std::vector<ClassIndex> labels, std::vector<std::string> class_names, ClassIndex normal_class,
          bool normalized = false);

  std::size_t rows() const { return labels_.size(); }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return class_names_.size(); }

  double at(std::size_t row, std::size_t feature) const { return features_[row * n_features_ + feature]; }
  std::span<const double> row(std::size_t r) const {
    return {features_.data() + r * n_features_, n_features_};
  }
  std::span<const double> values() const { return features_; }

  ClassIndex label(std::size_t r) const { return labels_[r]; }
  std::span<const ClassIndex> labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<FeatureMeta>& feature_meta() const { return meta_; }
  ClassIndex normal_class() const { return normal_class_; }
  bool normalized() const { return normalized_; }

  std::vector<std::size_t> class_counts() const;

  /// Copy restricted to the given feature columns, in the given order.
  Dataset select_features(std::span<const std::size_t> features) const;

 private:
  std::vector<double> features_;
  std::size_t n_features_;
  std::vector<FeatureMeta> meta_;
  std::vector<ClassIndex> labels_;
  std::vector<std::string> class_names_;
  ClassIndex normal_class_;
  bool normalized_;
};

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // per row, in [0, k)
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

RawTable parse_csv(std::istream& in, const ColumnRef& label_column, bool has_header);
RawTable load_csv(const std::filesystem::path& path, const ColumnRef& label_column, bool has_header);

/// Deduplicates same-named columns, replaces missing and non-finite tokens with
/// "0", and drops constant feature columns. Rows are never removed.
std::pair<RawTable, PreprocessReport> filter(const RawTable& raw);

/// Numeric columns are parsed as reals; anything else gets first-appearance
/// integer codes. When `normal_class_name` is absent the benign class is
/// guessed ("normal" or "benign", case-insensitive), falling back to class 0.
Dataset encode(const RawTable& raw, const std::optional<std::string>& normal_class_name = std::nullopt);

/// Min-max scales every feature to [0, 1] from the column's current range.
/// Feature metadata keeps the ranges recorded by encode.
Dataset normalize(const Dataset& ds);

/// Shuffles each class with a seeded generator, then deals rows round-robin,
/// continuing the deal position from one class to the next.
FoldAssignment stratified_folds(std::span<const ClassIndex> labels, std::size_t n_classes, std::size_t k,
                                std::uint64_t seed);
FoldAssignment stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed);

// Canonical on-disk form: CSV of features plus a trailing label column with
// class names, and a JSON sidecar holding metadata.
void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                   const std::filesystem::path& meta_path);
Dataset read_dataset(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace idsforge
