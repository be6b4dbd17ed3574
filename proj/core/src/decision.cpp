#include "pba/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pba/error.hpp"

namespace pba {

Interval expected_interval(const EmpiricalPBox& e, const Utility& utility) {
  auto u = [&](double y) { return utility ? utility(y) : y; };
  const std::vector<double> pts = e.jumps();
  double prev = u(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double cur = u(pts[i]);
    if (!(cur >= prev)) {
      throw Error(ErrorCode::kNonMonotoneUtility,
                  "utility decreases between outcomes " +
                      std::to_string(pts[i - 1]) + " and " +
                      std::to_string(pts[i]));
    }
    prev = cur;
  }
  double from_min = 0.0, from_max = 0.0;
  for (const Extremum& x : e.extrema()) {
    from_min += x.mass * u(x.y_min);
    from_max += x.mass * u(x.y_max);
  }
  return {std::min(from_min, from_max), std::max(from_min, from_max)};
}

Choice choose(const std::vector<UtilityInterval>& us, const DecisionRule& rule) {
  if (us.size() < 2) {
    throw Error(ErrorCode::kTooFewActions, "a choice needs at least 2 actions");
  }
  for (const auto& x : us) {
    if (!(x.value.lo <= x.value.hi)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "utility interval for '" + x.action + "' is reversed");
    }
  }
  Choice out;
  if (rule.kind == DecisionRule::Kind::kDominance) {
    std::vector<std::size_t> undominated;
    for (std::size_t i = 0; i < us.size(); ++i) {
      bool beaten = false;
      for (std::size_t j = 0; j < us.size() && !beaten; ++j) {
        beaten = us[j].value.lo > us[i].value.lo &&
                 us[j].value.hi > us[i].value.hi;
      }
      if (!beaten) undominated.push_back(i);
    }
    const Interval first = us[undominated.front()].value;
    const bool all_equal =
        std::all_of(undominated.begin(), undominated.end(),
                    [&](std::size_t i) { return us[i].value == first; });
    if (!all_equal) {
      out.indeterminate = true;
      return out;
    }
    for (std::size_t i : undominated) out.actions.push_back(us[i].action);
    return out;
  }
  double alpha = rule.alpha;
  if (rule.kind == DecisionRule::Kind::kPessimist) alpha = 1.0;
  if (rule.kind == DecisionRule::Kind::kOptimist) alpha = 0.0;
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Hurwicz alpha outside [0, 1]");
  }
  auto score = [&](const Interval& v) {
    if (alpha == 1.0) return v.lo;
    if (alpha == 0.0) return v.hi;
    return alpha * v.lo + (1.0 - alpha) * v.hi;
  };
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : us) best = std::max(best, score(x.value));
  for (const auto& x : us) {
    if (score(x.value) == best) out.actions.push_back(x.action);
  }
  return out;
}

}  // namespace pba
