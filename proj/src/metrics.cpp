#include "idsforge/metrics.hpp"

#include <algorithm>
#include <set>

#include "idsforge/error.hpp"

namespace idsforge {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : names_(std::move(class_names)), counts_(names_.size() * names_.size(), 0) {
  if (names_.empty()) throw InputError("confusion matrix needs at least one class");
}

void ConfusionMatrix::add(ClassIndex truth, ClassIndex predicted, std::uint64_t count) {
  if (truth >= n_classes() || predicted >= n_classes()) throw InputError("class index out of range");
  counts_[truth * n_classes() + predicted] += count;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.names_ != names_) throw InputError("cannot merge confusion matrices over different classes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto v : counts_) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::row_total(ClassIndex truth) const {
  std::uint64_t t = 0;
  for (std::size_t p = 0; p < n_classes(); ++p) t += at(truth, p);
  return t;
}

std::uint64_t ConfusionMatrix::column_total(ClassIndex predicted) const {
  std::uint64_t t = 0;
  for (std::size_t r = 0; r < n_classes(); ++r) t += at(r, predicted);
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t c = 0; c < n_classes(); ++c) t += at(c, c);
  return t;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, ClassIndex normal_class, AdrMode adr_mode) {
  const std::size_t c = cm.n_classes();
  if (normal_class >= c) throw InputError("normal class index out of range");
  const double total = static_cast<double>(cm.total());
  if (total == 0.0) throw InputError("confusion matrix is empty");

  MetricsReport m;
  m.accuracy = static_cast<double>(cm.trace()) / total;

  for (std::size_t k = 0; k < c; ++k) {
    const double support = static_cast<double>(cm.row_total(k));
    const double predicted = static_cast<double>(cm.column_total(k));
    const double tp = static_cast<double>(cm.at(k, k));
    const double recall = support > 0.0 ? tp / support : 0.0;
    double precision = 0.0;
    if (predicted > 0.0) {
      precision = tp / predicted;
    } else {
      m.unpredicted_classes.push_back(cm.class_names()[k]);
    }
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double w = support / total;
    m.precision_w += w * precision;
    m.dr_w += w * recall;
    m.f_measure_w += w * f1;
  }

  std::uint64_t attacks = 0, detected = 0;
  for (std::size_t t = 0; t < c; ++t) {
    if (t == normal_class) continue;
    attacks += cm.row_total(t);
    if (adr_mode == AdrMode::exact_class) {
      detected += cm.at(t, t);
    } else {
      detected += cm.row_total(t) - cm.at(t, normal_class);
    }
  }
  m.adr = attacks ? static_cast<double>(detected) / static_cast<double>(attacks) : 0.0;

  const std::uint64_t normals = cm.row_total(normal_class);
  const std::uint64_t false_alarms = normals - cm.at(normal_class, normal_class);
  m.far = normals ? static_cast<double>(false_alarms) / static_cast<double>(normals) : 0.0;
  return m;
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw InputError("no reports to average");
  MetricsReport out;
  std::set<std::string> unpredicted;
  for (const auto& r : reports) {
    out.accuracy += r.accuracy;
    out.precision_w += r.precision_w;
    out.dr_w += r.dr_w;
    out.f_measure_w += r.f_measure_w;
    out.adr += r.adr;
    out.far += r.far;
    out.mbt_seconds += r.mbt_seconds;
    unpredicted.insert(r.unpredicted_classes.begin(), r.unpredicted_classes.end());
  }
  const double n = static_cast<double>(reports.size());
  out.accuracy /= n;
  out.precision_w /= n;
  out.dr_w /= n;
  out.f_measure_w /= n;
  out.adr /= n;
  out.far /= n;
  out.mbt_seconds /= n;
  out.unpredicted_classes.assign(unpredicted.begin(), unpredicted.end());
  return out;
}

}  // namespace idsforge
