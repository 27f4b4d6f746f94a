#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "idsforge/cv.hpp"
#include "idsforge/error.hpp"
#include "idsforge/json_io.hpp"
#include "idsforge/metrics.hpp"
#include "idsforge/stats.hpp"
#include "support.hpp"

using namespace idsforge;
using doctest::Approx;

namespace {

const std::vector<std::string> kAlgorithms = {"Voting", "Stacking", "AdaBoost", "GBM", "kNN", "CART", "MLP"};
const std::vector<double> kAccuracyRanks = {1.667, 3.133, 3.867, 2.067, 5.467, 4.867, 6.933};
const std::vector<double> kAdrRanks = {1.467, 3.600, 3.733, 3.400, 5.533, 3.467, 6.800};
const std::vector<double> kFarRanks = {1.867, 2.733, 3.333, 4.000, 5.533, 4.533, 6.000};

ConfusionMatrix matrix(const std::vector<std::vector<std::uint64_t>>& counts) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < counts.size(); ++i) names.push_back("c" + std::to_string(i));
  ConfusionMatrix cm(names);
  for (std::size_t t = 0; t < counts.size(); ++t) {
    for (std::size_t p = 0; p < counts.size(); ++p) cm.add(t, p, counts[t][p]);
  }
  return cm;
}

MetricTable table(const std::string& text) {
  std::istringstream in(text);
  return parse_metric_table(in);
}

// Composite Simpson integral of t^(a-1)(1-t)^(b-1) on [0, x], normalized by the full integral.
double quadrature_beta(double a, double b, double x) {
  auto integral = [&](double upper) {
    const int steps = 20000;
    const double h = upper / steps;
    double s = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double t = i * h;
      const double f = std::pow(t, a - 1) * std::pow(1 - t, b - 1);
      s += f * (i == 0 || i == steps ? 1 : (i % 2 ? 4 : 2));
    }
    return s * h / 3;
  };
  return integral(x) / integral(1.0);
}

}  // namespace

TEST_CASE("confusion matrix bookkeeping") {
  auto cm = matrix({{3, 1}, {2, 4}});
  CHECK(cm.total() == 10);
  CHECK(cm.row_total(0) == 4);
  CHECK(cm.column_total(0) == 5);
  CHECK(cm.trace() == 7);
  cm += matrix({{1, 0}, {0, 1}});
  CHECK(cm.total() == 12);
  CHECK_THROWS_AS(cm.add(2, 0), InputError);
  CHECK_THROWS_AS(cm += ConfusionMatrix({"x", "y"}), InputError);
}

TEST_CASE("metrics of a diagonal matrix") {
  const auto m = compute_metrics(matrix({{5, 0, 0}, {0, 3, 0}, {0, 0, 7}}), 0);
  CHECK(m.accuracy == 1.0);
  CHECK(m.adr == 1.0);
  CHECK(m.far == 0.0);
  CHECK(m.f_measure_w == Approx(1.0));
  CHECK(m.unpredicted_classes.empty());
}

TEST_CASE("metrics of a two-class matrix") {
  const auto m = compute_metrics(matrix({{90, 10}, {20, 80}}), 0);
  CHECK(m.accuracy == Approx(0.85).epsilon(1e-15));
  CHECK(m.far == Approx(0.10).epsilon(1e-15));
  CHECK(m.adr == Approx(0.80).epsilon(1e-15));
  // Class 0: precision 90/110, recall 0.9. Class 1: precision 80/90, recall 0.8.
  CHECK(m.precision_w == Approx(0.5 * 90.0 / 110.0 + 0.5 * 80.0 / 90.0).epsilon(1e-12));
  CHECK(m.dr_w == Approx(0.85).epsilon(1e-12));
}

TEST_CASE("all-normal predictions") {
  const auto m = compute_metrics(matrix({{50, 0, 0}, {10, 0, 0}, {5, 0, 0}}), 0);
  CHECK(m.adr == 0.0);
  CHECK(m.far == 0.0);
  CHECK(m.unpredicted_classes == std::vector<std::string>{"c1", "c2"});
}

TEST_CASE("ADR modes and metric ranges on random matrices") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t c = 2 + rng.below(4);
    std::vector<std::vector<std::uint64_t>> counts(c, std::vector<std::uint64_t>(c));
    for (auto& row : counts) {
      for (auto& v : row) v = rng.below(30);
    }
    counts[0][0] += 1;
    const auto cm = matrix(counts);
    const auto exact = compute_metrics(cm, 0, AdrMode::exact_class);
    const auto binary = compute_metrics(cm, 0, AdrMode::binary);
    CHECK(binary.adr >= exact.adr);
    for (double v : {exact.accuracy, exact.precision_w, exact.dr_w, exact.f_measure_w, exact.adr, exact.far}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
    std::uint64_t off = 0;
    for (std::size_t t = 0; t < c; ++t) {
      for (std::size_t p = 0; p < c; ++p) off += t == p ? 0 : counts[t][p];
    }
    CHECK(exact.accuracy == Approx(1.0 - static_cast<double>(off) / static_cast<double>(cm.total())).epsilon(1e-15));
  }
  CHECK_THROWS_AS(compute_metrics(matrix({{0, 0}, {0, 0}}), 0), InputError);
  CHECK_THROWS_AS(compute_metrics(matrix({{1, 0}, {0, 1}}), 2), InputError);
}

TEST_CASE("mean report averages") {
  MetricsReport a, b;
  a.accuracy = 0.8;
  b.accuracy = 1.0;
  a.far = 0.2;
  a.unpredicted_classes = {"x"};
  const auto m = mean_report({a, b});
  CHECK(m.accuracy == Approx(0.9));
  CHECK(m.far == Approx(0.1));
  CHECK(m.unpredicted_classes == std::vector<std::string>{"x"});
  CHECK_THROWS_AS(mean_report({}), InputError);
}

TEST_CASE("cross-validation with a majority-class learner") {
  const auto ds = testing::separable(200, 3, 8);
  const auto counts = ds.class_counts();
  const auto balanced_rows = [&] {
    std::vector<std::size_t> pick;
    std::size_t taken[2] = {0, 0};
    const std::size_t m = std::min(counts[0], counts[1]);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      if (taken[ds.label(r)] < m) {
        pick.push_back(r);
        ++taken[ds.label(r)];
      }
    }
    return pick;
  }();
  std::vector<std::vector<double>> rows;
  std::vector<ClassIndex> labels;
  for (auto r : balanced_rows) {
    rows.emplace_back(ds.row(r).begin(), ds.row(r).end());
    labels.push_back(ds.label(r));
  }
  const auto balanced = testing::make_dataset(rows, labels, 2);
  PipelineSpec spec;
  TreeParams stump;
  stump.max_depth = 0;
  spec.classifiers = {ClassifierSpec{LearnerKind::c45, stump}};
  const auto out = cross_validate(balanced, spec, 10, 1, 3);
  CHECK(std::abs(out.members[0].mean.accuracy - 0.5) <= 0.1);
}

TEST_CASE("cross-validation with leaked labels is perfect") {
  const auto ds = testing::label_leak(120, 4, 3, 2);
  PipelineSpec spec;
  spec.classifiers = {ClassifierSpec{LearnerKind::c45}, ClassifierSpec{LearnerKind::random_forest, {}, 10},
                      ClassifierSpec{LearnerKind::forest_pa, {}, 10}};
  spec.features = std::vector<std::size_t>{0};
  const auto out = cross_validate(ds, spec, 5, 2, 9);
  for (const auto& r : out.members) {
    CHECK(r.mean.accuracy == 1.0);
    CHECK(r.mean.far == 0.0);
  }
  REQUIRE(out.ensembles.size() == 1);
  CHECK(out.ensembles[0].mean.accuracy == 1.0);
  CHECK(out.ensembles[0].name == "average-of-probabilities");
}

TEST_CASE("cross-validation conserves instances and is reproducible") {
  const auto ds = testing::mixed_relevance(150, 5, 4);
  PipelineSpec spec;
  spec.classifiers = {ClassifierSpec{LearnerKind::c45}, ClassifierSpec{LearnerKind::random_forest, {}, 5}};
  spec.rules.assign(kAllRules.begin(), kAllRules.end());
  const auto a = cross_validate(ds, spec, 4, 3, 5);
  const auto b = cross_validate(ds, spec, 4, 3, 5);
  REQUIRE(a.ensembles.size() == 5);
  for (const auto* side : {&a.members, &a.ensembles}) {
    for (const auto& r : *side) {
      CHECK(r.confusion.total() == ds.rows() * 3);
      CHECK(r.per_repeat.size() == 3);
      for (std::size_t c = 0; c < ds.n_classes(); ++c) CHECK(r.confusion.row_total(c) == ds.class_counts()[c] * 3);
    }
  }
  for (std::size_t i = 0; i < a.members.size(); ++i) CHECK(a.members[i].confusion == b.members[i].confusion);
  for (std::size_t i = 0; i < a.ensembles.size(); ++i) CHECK(a.ensembles[i].confusion == b.ensembles[i].confusion);
}

TEST_CASE("cross-validation errors") {
  const auto ds = testing::make_dataset({{1}, {2}, {3}, {4}, {5}}, {0, 0, 0, 0, 1}, 2);
  PipelineSpec spec;
  spec.classifiers = {ClassifierSpec{}};
  try {
    cross_validate(ds, spec, 2, 1, 1);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("c1") != std::string::npos);
  }
  const auto ok = testing::separable(40, 2, 1);
  CHECK_THROWS_AS(cross_validate(ok, spec, 1, 1, 1), InputError);
  CHECK_THROWS_AS(cross_validate(ok, spec, 2, 0, 1), InputError);
  CHECK_THROWS_AS(cross_validate(ok, PipelineSpec{}, 2, 1, 1), InputError);
}

TEST_CASE("learner names") {
  CHECK(parse_learner("c45") == LearnerKind::c45);
  CHECK(parse_learner("rf") == LearnerKind::random_forest);
  CHECK(parse_learner("forest-pa") == LearnerKind::forest_pa);
  CHECK_FALSE(parse_learner("svm"));
  CHECK(parse_learner(to_string(LearnerKind::forest_pa)) == LearnerKind::forest_pa);
}

TEST_CASE("incomplete beta matches quadrature and symmetry") {
  for (double a : {1.0, 2.0, 3.0, 6.0}) {
    for (double b : {1.0, 2.0, 5.0, 12.0}) {
      for (double x : {0.05, 0.3, 0.5, 0.77, 0.95}) {
        const double v = regularized_incomplete_beta(a, b, x);
        CHECK(v == Approx(quadrature_beta(a, b, x)).epsilon(1e-8));
        CHECK(v == Approx(1.0 - regularized_incomplete_beta(b, a, 1.0 - x)).epsilon(1e-10));
      }
    }
  }
  CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 3, 0.5), InputError);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 3, 1.5), InputError);
}

TEST_CASE("F upper tail is monotone") {
  double prev = 1.0;
  for (double f = 0.0; f < 30.0; f += 0.25) {
    const double p = f_distribution_sf(f, 6, 12);
    CHECK(p <= prev);
    CHECK(p >= 0.0);
    prev = p;
  }
  CHECK(f_distribution_sf(0.0, 6, 12) == 1.0);
  // Two-sided check against the closed form for df1 = 2: P(F > f) = (1 + 2f/df2)^(-df2/2).
  CHECK(f_distribution_sf(3.0, 2, 10) == Approx(std::pow(1 + 2 * 3.0 / 10, -5.0)).epsilon(1e-10));
}

TEST_CASE("ranking examples") {
  const auto ranks = rank_algorithms(table("A,B,C\n0.9,0.8,0.7\n0.9,0.9,0.7\n"), true);
  CHECK(ranks.at(0, 0) == 1.0);
  CHECK(ranks.at(0, 1) == 2.0);
  CHECK(ranks.at(0, 2) == 3.0);
  CHECK(ranks.at(1, 0) == 1.5);
  CHECK(ranks.at(1, 1) == 1.5);
  CHECK(ranks.at(1, 2) == 3.0);
  const auto low = rank_algorithms(table("A,B,C\n0.9,0.8,0.7\n"), false);
  CHECK(low.at(0, 2) == 1.0);
  CHECK_THROWS_AS(rank_algorithms(table("A\n1\n"), true), InputError);
}

TEST_CASE("metric table parsing") {
  const auto t = table("data,A,B\nd1,1,2\nd2,3,4\n");
  CHECK(t.datasets == std::vector<std::string>{"d1", "d2"});
  CHECK(t.algorithms == std::vector<std::string>{"A", "B"});
  CHECK(t.at(1, 0) == 3.0);
  const auto bare = table("A,B\n1,2\n");
  CHECK(bare.datasets.size() == 1);
  CHECK_THROWS_AS(table("A,B\n1,x\n"), InputError);
  CHECK_THROWS_AS(table("A,B\n1\n"), InputError);
}

TEST_CASE("rank rows always sum to k(k+1)/2") {
  Rng rng(20);
  for (int trial = 0; trial < 300; ++trial) {
    MetricTable t;
    const std::size_t k = 2 + rng.below(8), n = 1 + rng.below(6);
    for (std::size_t j = 0; j < k; ++j) t.algorithms.push_back("a" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) t.datasets.push_back("d" + std::to_string(i));
    for (std::size_t v = 0; v < n * k; ++v) t.values.push_back(static_cast<double>(rng.below(4)));
    const auto r = rank_algorithms(t, rng.below(2) == 0);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += r.at(i, j);
      CHECK(sum == static_cast<double>(k * (k + 1)) / 2.0);
    }
    const auto means = r.mean_ranks();
    CHECK(std::abs(std::accumulate(means.begin(), means.end(), 0.0) / k - (k + 1.0) / 2.0) <= 1e-9);
  }
}

TEST_CASE("Friedman test on published mean ranks") {
  const auto acc = friedman_from_mean_ranks(kAccuracyRanks, 3);
  CHECK(acc.chi2_f == Approx(13.80).epsilon(0.001));
  CHECK(std::abs(acc.f_statistic - 6.5665) <= 0.005);
  CHECK(std::abs(acc.p_value - 0.0029) <= 0.002);
  CHECK(acc.df1 == 6.0);
  CHECK(acc.df2 == 12.0);
  REQUIRE(acc.reject_at.size() == 2);
  CHECK(acc.reject_at[0].second);
  CHECK(acc.reject_at[1].second);

  const auto adr = friedman_from_mean_ranks(kAdrRanks, 3);
  CHECK(std::abs(adr.f_statistic - 3.3242) <= 0.005);
  CHECK(std::abs(adr.p_value - 0.0363) <= 0.002);
  const auto far = friedman_from_mean_ranks(kFarRanks, 3);
  CHECK(std::abs(far.f_statistic - 1.7904) <= 0.005);
  CHECK(std::abs(far.p_value - 0.1839) <= 0.002);
  CHECK_FALSE(far.reject_at[0].second);
}

TEST_CASE("Friedman edge cases") {
  const auto same = friedman_test(rank_algorithms(table("A,B,C\n1,1,1\n2,2,2\n3,3,3\n"), true));
  CHECK(same.chi2_f == 0.0);
  CHECK(same.f_statistic == 0.0);
  CHECK(same.p_value == Approx(1.0));

  const auto sweep = friedman_test(rank_algorithms(table("A,B\n2,1\n5,4\n9,3\n"), true));
  CHECK(sweep.chi2_f == Approx(3.0).epsilon(1e-12));
  CHECK(std::isinf(sweep.f_statistic));
  CHECK(sweep.p_value == 0.0);
  const Json j = to_json(sweep);
  CHECK(j["f_statistic"].is_null());
  CHECK(j["f_statistic_infinite"] == true);

  CHECK_THROWS_AS(friedman_from_mean_ranks(std::vector<double>{1.0, 1.0}, 3), InputError);
  CHECK_THROWS_AS(friedman_from_mean_ranks(std::vector<double>{1.0, 2.0}, 1), InputError);
}

TEST_CASE("ranks given directly") {
  const auto r = ranks_as_given(table("A,B,C\n1,2,3\n2.5,2.5,1\n"));
  CHECK(r.at(1, 0) == 2.5);
  CHECK_THROWS_AS(ranks_as_given(table("A,B,C\n1,1,1\n")), InputError);
  CHECK_THROWS_AS(ranks_as_given(table("A,B\n0,3\n")), InputError);
}

TEST_CASE("Nemenyi critical differences") {
  CHECK(nemenyi_q(7, 0.05) == 2.949);
  CHECK(nemenyi_q(7, 0.1) == 2.693);
  CHECK(nemenyi_q(2, 0.05) == 1.960);
  CHECK(critical_difference(7, 3, 0.05) == Approx(2.949 * std::sqrt(56.0 / 18.0)).epsilon(1e-12));
  CHECK(std::abs(critical_difference(7, 3, 0.05) - 5.2016) <= 1e-3);
  CHECK(std::abs(critical_difference(7, 3, 0.1) - 4.7501) <= 1e-3);
  CHECK_THROWS_AS(nemenyi_q(11, 0.05), InputError);
  CHECK_THROWS_AS(nemenyi_q(5, 0.01), InputError);

  auto has = [](const NemenyiResult& r, const std::string& a, const std::string& b) {
    return std::any_of(r.significant_pairs.begin(), r.significant_pairs.end(), [&](const SignificantPair& p) {
      return (p.first == a && p.second == b) || (p.first == b && p.second == a);
    });
  };
  const auto strict = nemenyi(kAccuracyRanks, kAlgorithms, 3, 0.05);
  const auto loose = nemenyi(kAccuracyRanks, kAlgorithms, 3, 0.1);
  CHECK(has(strict, "Voting", "MLP"));
  CHECK_FALSE(has(strict, "GBM", "MLP"));
  CHECK(has(loose, "GBM", "MLP"));
  CHECK(has(loose, "Voting", "MLP"));
  CHECK(strict.significant_pairs.size() == 1);
  CHECK(loose.significant_pairs.size() == 2);
  for (const auto& p : loose.significant_pairs) CHECK(p.rank_difference >= loose.cd);

  const std::string summary = cd_summary(kAccuracyRanks, kAlgorithms, {strict, loose});
  CHECK(summary.find("Voting") != std::string::npos);
  CHECK(summary.find("MLP") != std::string::npos);
}

TEST_CASE("pairs are flagged exactly when the gap reaches the CD") {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(9), n = 2 + rng.below(20);
    std::vector<double> means(k);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < k; ++j) {
      means[j] = 1.0 + rng.uniform() * static_cast<double>(k - 1);
      names.push_back("a" + std::to_string(j));
    }
    const auto r = nemenyi(means, names, n, 0.05);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) expected += std::abs(means[i] - means[j]) >= r.cd;
    }
    CHECK(r.significant_pairs.size() == expected);
  }
}
