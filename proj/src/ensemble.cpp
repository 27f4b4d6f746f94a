#include "idsforge/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idsforge/error.hpp"

namespace idsforge {

std::string_view to_string(CombinationRule rule) {
  switch (rule) {
    case CombinationRule::average_of_probabilities: return "average-of-probabilities";
    case CombinationRule::majority_voting: return "majority-voting";
    case CombinationRule::product_of_probabilities: return "product-of-probabilities";
    case CombinationRule::minimum_probability: return "minimum-probability";
    case CombinationRule::maximum_probability: return "maximum-probability";
  }
  throw InvariantError("unknown combination rule");
}

std::optional<CombinationRule> parse_rule(std::string_view name) {
  for (auto rule : kAllRules) {
    if (to_string(rule) == name) return rule;
  }
  return std::nullopt;
}

namespace {

ClassIndex first_max(std::span<const double> v) {
  return static_cast<ClassIndex>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Scales to unit sum; a vector with no mass becomes uniform.
std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum > 0.0)) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

CombineResult combine(std::span<const ClassDistribution> distributions, CombinationRule rule) {
  if (distributions.empty()) throw InputError("combine needs at least one distribution");
  const std::size_t c = distributions.front().size();
  for (const auto& d : distributions) {
    if (d.size() != c) throw InputError("member distributions differ in class count");
  }
  const auto l = static_cast<double>(distributions.size());

  std::vector<double> mean(c, 0.0);
  for (const auto& d : distributions) {
    for (std::size_t j = 0; j < c; ++j) mean[j] += d[j];
  }
  for (double& m : mean) m /= l;

  CombineResult out;
  switch (rule) {
    case CombinationRule::average_of_probabilities: {
      out.label = first_max(mean);
      out.distribution = ClassDistribution(normalized(mean));
      break;
    }
    case CombinationRule::majority_voting: {
      std::vector<double> votes(c, 0.0);
      for (const auto& d : distributions) votes[d.argmax()] += 1.0;
      std::size_t winner = 0;
      for (std::size_t j = 1; j < c; ++j) {
        if (votes[j] > votes[winner] || (votes[j] == votes[winner] && mean[j] > mean[winner])) winner = j;
      }
      out.label = winner;
      out.distribution = ClassDistribution(normalized(votes));
      out.fewer_voters_than_classes = distributions.size() < c;
      break;
    }
    case CombinationRule::product_of_probabilities: {
      // Log domain keeps long products of small probabilities from underflowing.
      std::vector<double> logs(c, 0.0);
      for (const auto& d : distributions) {
        for (std::size_t j = 0; j < c; ++j) {
          logs[j] += d[j] > 0.0 ? std::log(d[j]) : -std::numeric_limits<double>::infinity();
        }
      }
      const double top = *std::max_element(logs.begin(), logs.end());
      std::vector<double> scores(c, 0.0);
      if (std::isfinite(top)) {
        for (std::size_t j = 0; j < c; ++j) scores[j] = std::exp(logs[j] - top);
      }
      out.distribution = ClassDistribution(normalized(scores));
      out.label = first_max(out.distribution.probs);
      break;
    }
    case CombinationRule::minimum_probability:
    case CombinationRule::maximum_probability: {
      const bool use_min = rule == CombinationRule::minimum_probability;
      std::vector<double> scores = distributions.front().probs;
      for (const auto& d : distributions.subspan(1)) {
        for (std::size_t j = 0; j < c; ++j) scores[j] = use_min ? std::min(scores[j], d[j]) : std::max(scores[j], d[j]);
      }
      out.label = first_max(scores);
      out.distribution = ClassDistribution(normalized(scores));
      break;
    }
  }
  return out;
}

VoteEnsemble::VoteEnsemble(std::vector<std::shared_ptr<const Classifier>> members, CombinationRule rule)
    : members_(std::move(members)), rule_(rule) {
  if (members_.empty()) throw InputError("ensemble needs at least one member");
  for (const auto& m : members_) {
    if (!m) throw InputError("ensemble member is null");
    if (m->n_classes() != members_.front()->n_classes() || m->n_features() != members_.front()->n_features()) {
      throw InputError("ensemble members disagree on feature or class count");
    }
  }
}

CombineResult VoteEnsemble::decide(std::span<const double> row) const {
  std::vector<ClassDistribution> dists;
  dists.reserve(members_.size());
  for (const auto& m : members_) dists.push_back(m->predict(row));
  return combine(dists, rule_);
}

ClassDistribution VoteEnsemble::predict(std::span<const double> row) const { return decide(row).distribution; }

}  // namespace idsforge
