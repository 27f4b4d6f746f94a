#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "idsforge/dataset.hpp"

namespace idsforge {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> class_names);

  std::size_t n_classes() const { return names_.size(); }
  const std::vector<std::string>& class_names() const { return names_; }

  void add(ClassIndex truth, ClassIndex predicted, std::uint64_t count = 1);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  std::uint64_t at(ClassIndex truth, ClassIndex predicted) const { return counts_[truth * n_classes() + predicted]; }
  std::uint64_t total() const;
  std::uint64_t row_total(ClassIndex truth) const;
  std::uint64_t column_total(ClassIndex predicted) const;
  std::uint64_t trace() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::uint64_t> counts_;
};

/// How attack detection is credited.
///   exact_class: an attack counts only when predicted as its own attack class.
///   binary: an attack counts when predicted as any attack class.
enum class AdrMode { exact_class, binary };

struct MetricsReport {
  double accuracy = 0.0;
  double precision_w = 0.0;  // support-weighted one-vs-rest precision
  double dr_w = 0.0;         // support-weighted recall
  double f_measure_w = 0.0;
  double adr = 0.0;
  double far = 0.0;
  double mbt_seconds = 0.0;
  // Classes that were never predicted; their precision is taken as 0.
  std::vector<std::string> unpredicted_classes;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm, ClassIndex normal_class,
                              AdrMode adr_mode = AdrMode::exact_class);

/// Element-wise mean of several reports (the unpredicted-class lists are merged).
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

}  // namespace idsforge
