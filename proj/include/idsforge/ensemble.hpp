#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idsforge/tree.hpp"

namespace idsforge {

enum class CombinationRule {
  average_of_probabilities,
  majority_voting,
  product_of_probabilities,
  minimum_probability,
  maximum_probability,
};

inline constexpr std::array<CombinationRule, 5> kAllRules = {
    CombinationRule::average_of_probabilities, CombinationRule::majority_voting,
    CombinationRule::product_of_probabilities, CombinationRule::minimum_probability,
    CombinationRule::maximum_probability};

/// Kebab-case name, e.g. "average-of-probabilities".
std::string_view to_string(CombinationRule rule);
std::optional<CombinationRule> parse_rule(std::string_view name);

struct CombineResult {
  ClassIndex label = 0;
  ClassDistribution distribution;
  // Majority voting with fewer members than classes cannot always form a majority.
  bool fewer_voters_than_classes = false;
};

/// Combines member distributions under `rule`. Ties go to the lowest class;
/// majority voting first breaks ties by the members' mean probability.
CombineResult combine(std::span<const ClassDistribution> distributions, CombinationRule rule);

class VoteEnsemble final : public Classifier {
 public:
  VoteEnsemble(std::vector<std::shared_ptr<const Classifier>> members, CombinationRule rule);

  std::size_t n_features() const override { return members_.front()->n_features(); }
  std::size_t n_classes() const override { return members_.front()->n_classes(); }
  ClassDistribution predict(std::span<const double> row) const override;
  CombineResult decide(std::span<const double> row) const;

  CombinationRule rule() const { return rule_; }
  const std::vector<std::shared_ptr<const Classifier>>& members() const { return members_; }

 private:
  std::vector<std::shared_ptr<const Classifier>> members_;
  CombinationRule rule_;
};

}  // namespace idsforge
