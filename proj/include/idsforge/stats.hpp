#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace idsforge {

/// Regularized incomplete beta I_x(a, b), evaluated by continued fraction
/// (modified Lentz) to a relative tolerance of 1e-10 or better.
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F distribution with (df1, df2) degrees of freedom.
double f_distribution_sf(double f, double df1, double df2);

/// Performance table: one row per dataset, one column per algorithm.
struct MetricTable {
  std::vector<std::string> algorithms;
  std::vector<std::string> datasets;
  std::vector<double> values;  // row-major, datasets x algorithms

  std::size_t n() const { return datasets.size(); }
  std::size_t k() const { return algorithms.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * k() + j]; }
};

/// Header row of algorithm names. When the first column is non-numeric it is
/// read as dataset names (its header cell is ignored).
MetricTable parse_metric_table(std::istream& in);
MetricTable read_metric_table(const std::filesystem::path& path);

struct RankTable {
  std::vector<std::string> algorithms;
  std::vector<std::string> datasets;
  std::vector<double> ranks;  // row-major n x k; best = 1, ties share the mid-rank
  bool higher_is_better = true;

  std::size_t n() const { return datasets.size(); }
  std::size_t k() const { return algorithms.size(); }
  double at(std::size_t i, std::size_t j) const { return ranks[i * k() + j]; }
  std::vector<double> mean_ranks() const;
};

RankTable rank_algorithms(const MetricTable& table, bool higher_is_better);

/// Uses the table's values as ranks without re-ranking (rows must sum to
/// k(k+1)/2 within 0.01).
RankTable ranks_as_given(const MetricTable& table);

struct FriedmanResult {
  std::vector<double> mean_ranks;
  double chi2_f = 0.0;
  double f_statistic = 0.0;  // +infinity when the denominator vanishes
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
  std::vector<std::pair<double, bool>> reject_at;  // (alpha, null rejected)
};

inline const std::vector<double> kDefaultAlphas = {0.05, 0.1};

FriedmanResult friedman_test(const RankTable& ranks, std::span<const double> alphas = kDefaultAlphas);

/// Same test from published mean ranks. The mean of the ranks must be within
/// 0.01 of (k+1)/2, which tolerates ranks rounded for print.
FriedmanResult friedman_from_mean_ranks(std::span<const double> mean_ranks, std::size_t n,
                                        std::span<const double> alphas = kDefaultAlphas);

/// Two-tailed Nemenyi critical value q_alpha for k = 2..10, alpha in {0.05, 0.1}.
double nemenyi_q(std::size_t k, double alpha);

/// CD = q_alpha · sqrt(k(k+1) / (6n)).
double critical_difference(std::size_t k, std::size_t n, double alpha);

struct SignificantPair {
  std::string first;
  std::string second;
  double rank_difference = 0.0;  // |mean rank first - mean rank second|
};

struct NemenyiResult {
  double alpha = 0.0;
  double cd = 0.0;
  double q_alpha = 0.0;
  std::vector<SignificantPair> significant_pairs;
};

/// Flags every pair whose mean ranks differ by at least the critical difference.
NemenyiResult nemenyi(std::span<const double> mean_ranks, const std::vector<std::string>& algorithms, std::size_t n,
                      double alpha);

/// Plain-text listing of the mean ranks, the CD and the significant pairs.
std::string cd_summary(std::span<const double> mean_ranks, const std::vector<std::string>& algorithms,
                       const std::vector<NemenyiResult>& results);

}  // namespace idsforge
