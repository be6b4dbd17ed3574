#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pba/interval.hpp"
#include "pba/propagation.hpp"

namespace pba {

struct UtilityInterval {
  std::string action;
  Interval value;
};

using Utility = std::function<double(double)>;

// Expected utility against both step bounds, returned as [min, max].
// utility must be non-decreasing over the outcome support; the default is
// the identity.
Interval expected_interval(const EmpiricalPBox& e, const Utility& utility = {});

struct DecisionRule {
  enum class Kind { kDominance, kPessimist, kOptimist, kHurwicz };
  Kind kind = Kind::kDominance;
  // Weight on the lower expectation; Hurwicz only.
  double alpha = 0.5;

  static DecisionRule dominance() { return {Kind::kDominance, 0.5}; }
  static DecisionRule pessimist() { return {Kind::kPessimist, 1.0}; }
  static DecisionRule optimist() { return {Kind::kOptimist, 0.0}; }
  static DecisionRule hurwicz(double a) { return {Kind::kHurwicz, a}; }
};

struct Choice {
  bool indeterminate = false;
  // Optimal actions in input order; empty when indeterminate.
  std::vector<std::string> actions;
};

Choice choose(const std::vector<UtilityInterval>& us, const DecisionRule& rule);

}  // namespace pba
