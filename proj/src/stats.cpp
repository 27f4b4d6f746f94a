#include "idsforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "idsforge/csv.hpp"
#include "idsforge/error.hpp"

namespace idsforge {

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw InvariantError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InputError("incomplete beta needs a > 0 and b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double df1, double df2) {
  if (!(df1 > 0.0 && df2 > 0.0)) throw InputError("F distribution needs positive degrees of freedom");
  if (std::isnan(f)) throw InputError("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{df2/(df2 + df1 f)}(df2/2, df1/2)
  return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

MetricTable parse_metric_table(std::istream& in) {
  auto records = csv::read_records(in);
  if (records.size() < 2) throw InputError("metric table needs a header row and at least one data row");
  const auto& header = records[0].fields;
  bool named_rows = true;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].fields.empty() || csv::parse_double(records[i].fields[0])) {
      named_rows = false;
      break;
    }
  }
  MetricTable table;
  const std::size_t first = named_rows ? 1 : 0;
  for (std::size_t j = first; j < header.size(); ++j) table.algorithms.emplace_back(csv::trim(header[j]));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.fields.size() != header.size()) {
      throw InputError("metric table row on line " + std::to_string(rec.line) + " has " +
                       std::to_string(rec.fields.size()) + " cells, expected " + std::to_string(header.size()));
    }
    table.datasets.push_back(named_rows ? std::string(csv::trim(rec.fields[0])) : "dataset" + std::to_string(i));
    for (std::size_t j = first; j < rec.fields.size(); ++j) {
      auto v = csv::parse_double(rec.fields[j]);
      if (!v) throw InputError("non-numeric metric '" + rec.fields[j] + "' on line " + std::to_string(rec.line));
      table.values.push_back(*v);
    }
  }
  return table;
}

MetricTable read_metric_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_metric_table(in);
}

std::vector<double> RankTable::mean_ranks() const {
  std::vector<double> out(k(), 0.0);
  for (std::size_t i = 0; i < n(); ++i) {
    for (std::size_t j = 0; j < k(); ++j) out[j] += at(i, j);
  }
  for (double& v : out) v /= static_cast<double>(n());
  return out;
}

namespace {

void check_shape(const MetricTable& table) {
  if (table.k() < 2) throw InputError("ranking needs at least 2 algorithms");
  if (table.n() < 1) throw InputError("ranking needs at least 1 dataset");
  if (table.values.size() != table.n() * table.k()) throw InputError("metric table is not rectangular");
  for (double v : table.values) {
    if (std::isnan(v)) throw InputError("metric table contains NaN");
  }
}

}  // namespace

RankTable rank_algorithms(const MetricTable& table, bool higher_is_better) {
  check_shape(table);
  RankTable out{table.algorithms, table.datasets, std::vector<double>(table.values.size()), higher_is_better};
  const std::size_t k = table.k();
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < table.n(); ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return higher_is_better ? table.at(i, a) > table.at(i, b) : table.at(i, a) < table.at(i, b);
    });
    for (std::size_t pos = 0; pos < k;) {
      std::size_t end = pos + 1;
      while (end < k && table.at(i, order[end]) == table.at(i, order[pos])) ++end;
      // Positions pos..end-1 hold ranks pos+1..end; each gets their mean.
      const double mid = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
      for (std::size_t q = pos; q < end; ++q) out.ranks[i * k + order[q]] = mid;
      pos = end;
    }
  }
  return out;
}

RankTable ranks_as_given(const MetricTable& table) {
  check_shape(table);
  const double k = static_cast<double>(table.k());
  for (std::size_t i = 0; i < table.n(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < table.k(); ++j) {
      const double r = table.at(i, j);
      if (r < 1.0 - 1e-9 || r > k + 1e-9) throw InputError("rank outside [1, k] in row " + table.datasets[i]);
      sum += r;
    }
    if (std::abs(sum - k * (k + 1.0) / 2.0) > 0.01) {
      throw InputError("ranks in row " + table.datasets[i] + " do not sum to k(k+1)/2");
    }
  }
  return RankTable{table.algorithms, table.datasets, table.values, true};
}

namespace {

FriedmanResult friedman_core(std::vector<double> mean_ranks, std::size_t n, std::span<const double> alphas) {
  const std::size_t k = mean_ranks.size();
  if (k < 2) throw InputError("Friedman test needs at least 2 algorithms");
  if (n < 2) throw InputError("Friedman test needs at least 2 datasets");
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);

  double sum_sq = 0.0;
  for (double r : mean_ranks) sum_sq += r * r;
  FriedmanResult out;
  out.chi2_f = std::max(0.0, 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0));
  out.df1 = kd - 1.0;
  out.df2 = (kd - 1.0) * (nd - 1.0);
  const double denom = nd * (kd - 1.0) - out.chi2_f;
  if (denom <= 0.0) {
    out.f_statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
  } else {
    out.f_statistic = (nd - 1.0) * out.chi2_f / denom;
    out.p_value = f_distribution_sf(out.f_statistic, out.df1, out.df2);
  }
  for (double a : alphas) out.reject_at.emplace_back(a, out.p_value < a);
  out.mean_ranks = std::move(mean_ranks);
  return out;
}

}  // namespace

FriedmanResult friedman_test(const RankTable& ranks, std::span<const double> alphas) {
  auto means = ranks.mean_ranks();
  const double k = static_cast<double>(ranks.k());
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / k;
  if (std::abs(mean - (k + 1.0) / 2.0) > 0.01) throw InvariantError("mean rank is not (k+1)/2");
  return friedman_core(std::move(means), ranks.n(), alphas);
}

FriedmanResult friedman_from_mean_ranks(std::span<const double> mean_ranks, std::size_t n,
                                        std::span<const double> alphas) {
  const double k = static_cast<double>(mean_ranks.size());
  if (mean_ranks.size() >= 1) {
    const double mean = std::accumulate(mean_ranks.begin(), mean_ranks.end(), 0.0) / k;
    if (std::abs(mean - (k + 1.0) / 2.0) > 0.01) throw InputError("mean ranks do not average to (k+1)/2");
  }
  return friedman_core(std::vector<double>(mean_ranks.begin(), mean_ranks.end()), n, alphas);
}

double nemenyi_q(std::size_t k, double alpha) {
  // Studentized range statistic divided by sqrt(2), k = 2..10.
  static constexpr double q05[] = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
  static constexpr double q10[] = {1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};
  if (k < 2 || k > 10) throw InputError("Nemenyi table covers 2 to 10 algorithms, got " + std::to_string(k));
  if (std::abs(alpha - 0.05) < 1e-12) return q05[k - 2];
  if (std::abs(alpha - 0.1) < 1e-12) return q10[k - 2];
  throw InputError("Nemenyi table covers alpha 0.05 and 0.1 only");
}

double critical_difference(std::size_t k, std::size_t n, double alpha) {
  if (n < 2) throw InputError("critical difference needs at least 2 datasets");
  const double kd = static_cast<double>(k);
  return nemenyi_q(k, alpha) * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

NemenyiResult nemenyi(std::span<const double> mean_ranks, const std::vector<std::string>& algorithms, std::size_t n,
                      double alpha) {
  if (mean_ranks.size() != algorithms.size()) throw InputError("one name per mean rank is required");
  NemenyiResult out;
  out.alpha = alpha;
  out.q_alpha = nemenyi_q(mean_ranks.size(), alpha);
  out.cd = critical_difference(mean_ranks.size(), n, alpha);
  for (std::size_t a = 0; a < mean_ranks.size(); ++a) {
    for (std::size_t b = a + 1; b < mean_ranks.size(); ++b) {
      const double diff = std::abs(mean_ranks[a] - mean_ranks[b]);
      if (diff >= out.cd) out.significant_pairs.push_back({algorithms[a], algorithms[b], diff});
    }
  }
  return out;
}

std::string cd_summary(std::span<const double> mean_ranks, const std::vector<std::string>& algorithms,
                       const std::vector<NemenyiResult>& results) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  std::vector<std::size_t> order(mean_ranks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean_ranks[a] < mean_ranks[b]; });
  out << "mean ranks (best first)\n";
  for (std::size_t j : order) out << "  " << algorithms[j] << "  " << mean_ranks[j] << '\n';
  for (const auto& r : results) {
    out << "\nalpha = " << r.alpha << "  q = " << r.q_alpha << "  CD = " << r.cd << '\n';
    if (r.significant_pairs.empty()) out << "  no significant pairs\n";
    for (const auto& p : r.significant_pairs) {
      out << "  " << p.first << " vs " << p.second << "  diff " << p.rank_difference << '\n';
    }
  }
  return out.str();
}

}  // namespace idsforge
