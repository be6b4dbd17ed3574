#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "expect_error.hpp"
#include "pba/decision.hpp"

namespace pba {
namespace {

std::vector<UtilityInterval> pair(Interval x, Interval y) {
  return {{"first", x}, {"second", y}};
}

using Names = std::vector<std::string>;

TEST(Choose, TabulatedCases) {
  const Choice d = choose(pair({1, 2}, {3, 4}), DecisionRule::dominance());
  EXPECT_FALSE(d.indeterminate);
  EXPECT_EQ(d.actions, Names{"second"});
  EXPECT_TRUE(choose(pair({1, 4}, {2, 3}), DecisionRule::dominance()).indeterminate);
  EXPECT_EQ(choose(pair({0, 10}, {4, 5}), DecisionRule::hurwicz(0.5)).actions,
            Names{"first"});
  EXPECT_EQ(choose(pair({1, 10}, {2, 3}), DecisionRule::pessimist()).actions,
            Names{"second"});
  EXPECT_EQ(choose(pair({1, 10}, {2, 3}), DecisionRule::optimist()).actions,
            Names{"first"});
}

TEST(Choose, TiesReturnAllMaximizers) {
  const Choice c = choose(pair({1, 3}, {1, 3}), DecisionRule::dominance());
  EXPECT_FALSE(c.indeterminate);
  EXPECT_EQ(c.actions, (Names{"first", "second"}));
  EXPECT_EQ(choose(pair({1, 5}, {1, 3}), DecisionRule::pessimist()).actions,
            (Names{"first", "second"}));
}

TEST(Choose, Errors) {
  EXPECT_PBA_ERROR(choose({{"only", {0, 1}}}, DecisionRule::dominance()),
                   ErrorCode::kTooFewActions);
  EXPECT_PBA_ERROR(choose(pair({0, 1}, {0, 1}), DecisionRule::hurwicz(1.5)),
                   ErrorCode::kInvalidArgument);
  EXPECT_PBA_ERROR(choose(pair({2, 1}, {0, 1}), DecisionRule::pessimist()),
                   ErrorCode::kInvalidArgument);
}

// Integer endpoints and dyadic weights keep every score exact.
std::vector<UtilityInterval> random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 6), v(0, 12), w(0, 6);
  std::vector<UtilityInterval> us;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double lo = v(rng);
    us.push_back({"a" + std::to_string(i), {lo, lo + w(rng)}});
  }
  return us;
}

TEST(ChooseProperties, HurwiczExtremesMatchPessimistOptimist) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto us = random_set(rng);
    EXPECT_EQ(choose(us, DecisionRule::hurwicz(1.0)).actions,
              choose(us, DecisionRule::pessimist()).actions);
    EXPECT_EQ(choose(us, DecisionRule::hurwicz(0.0)).actions,
              choose(us, DecisionRule::optimist()).actions);
  }
}

TEST(ChooseProperties, AffineInvariance) {
  std::mt19937_64 rng(2);
  const std::vector<DecisionRule> rules{
      DecisionRule::dominance(), DecisionRule::pessimist(),
      DecisionRule::optimist(), DecisionRule::hurwicz(0.25),
      DecisionRule::hurwicz(0.5)};
  for (int rep = 0; rep < 100; ++rep) {
    const auto us = random_set(rng);
    for (double scale : {0.5, 2.0, 4.0}) {
      for (double shift : {-3.0, 7.0}) {
        auto moved = us;
        for (auto& x : moved) {
          x.value = {scale * x.value.lo + shift, scale * x.value.hi + shift};
        }
        for (const DecisionRule& r : rules) {
          const Choice a = choose(us, r), b = choose(moved, r);
          EXPECT_EQ(a.indeterminate, b.indeterminate);
          EXPECT_EQ(a.actions, b.actions);
        }
      }
    }
  }
}

TEST(ChooseProperties, DominanceIndeterminateIffOrderingsDisagree) {
  std::mt19937_64 rng(3);
  auto sign = [](double x) { return (x > 0) - (x < 0); };
  for (int rep = 0; rep < 200; ++rep) {
    const auto two = random_set(rng);
    const auto us = pair(two[0].value, two[1].value);
    const Choice c = choose(us, DecisionRule::dominance());
    const int slo = sign(us[0].value.lo - us[1].value.lo);
    const int shi = sign(us[0].value.hi - us[1].value.hi);
    EXPECT_EQ(c.indeterminate, slo != shi);
  }
}

TEST(ChooseProperties, StrictDominatorWinsEverywhere) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    auto us = random_set(rng);
    double lo = 0, hi = 0;
    for (const auto& x : us) {
      lo = std::max(lo, x.value.lo);
      hi = std::max(hi, x.value.hi);
    }
    us.push_back({"best", {lo + 1, hi + 1}});
    for (const DecisionRule& r :
         {DecisionRule::dominance(), DecisionRule::pessimist(),
          DecisionRule::optimist(), DecisionRule::hurwicz(0.75)}) {
      EXPECT_EQ(choose(us, r).actions, Names{"best"});
    }
  }
}

TEST(ExpectedInterval, DegenerateAndVacuous) {
  const EmpiricalPBox point = EmpiricalPBox::from_samples({2.5});
  EXPECT_EQ(expected_interval(point), (Interval{2.5, 2.5}));
  // Min/max-only box through the identity: every focal element is [a, b].
  ParameterSet ps;
  ps.boxed["x"] = MinMax{-1, 3};
  const Model id{{"x"}, [](std::span<const double> x) { return x[0]; }};
  PropagationOptions opt;
  opt.n = 10;
  const PropagationResult r = propagate_pboxes(id, ps, opt);
  const Interval e = expected_interval(r.pbox);
  EXPECT_NEAR(e.lo, -1.0, 1e-5);
  EXPECT_NEAR(e.hi, 3.0, 1e-5);
}

TEST(ExpectedInterval, UtilityAndOrdering) {
  const EmpiricalPBox e({{0, 2, 0.5}, {1, 3, 0.5}});
  EXPECT_EQ(expected_interval(e), (Interval{0.5, 2.5}));
  const Interval sq = expected_interval(e, [](double y) { return y * y; });
  EXPECT_EQ(sq, (Interval{0.5, 6.5}));
  EXPECT_PBA_ERROR(expected_interval(e, [](double y) { return -y; }),
                   ErrorCode::kNonMonotoneUtility);
}

TEST(ExpectedInterval, NestedBoxesGiveNestedIntervals) {
  const Model id{{"x"}, [](std::span<const double> x) { return x[0]; }};
  PropagationOptions opt;
  opt.n = 20;
  const std::vector<MinimalData> chain{MinMax{0, 4}, MinMaxMean{0, 4, 1.0},
                                       MinMaxMeanStd{0, 4, 1.0, 0.5}};
  Interval prev{-1e300, 1e300};
  for (const MinimalData& d : chain) {
    ParameterSet ps;
    ps.boxed["x"] = d;
    const Interval e = expected_interval(propagate_pboxes(id, ps, opt).pbox);
    EXPECT_TRUE(prev.contains(e)) << e.lo << " " << e.hi;
    prev = e;
  }
}

TEST(ExpectedInterval, CaseStudyContainsPsaMeans) {
  const Model m = life_expectancy_model();
  ParameterSet box;
  box.fixed = {{"c2", 0.01}, {"c3", 0.001}, {"c4", 0.1}, {"c5", 0.05}};
  ParameterSet psa = box;
  box.boxed["c1"] = MinMaxMeanStd{0, 10, 0.05, 0.00033};
  box.boxed["c6"] = MinMaxMeanStd{0, 10, 1, 0.0167};
  Statistics s1, s6;
  s1.mean = 0.05;
  s1.sd = 0.00033;
  s6.mean = 1.0;
  s6.sd = 0.0167;
  psa.precise["c1"] = moment_match(Family::kGamma, s1);
  psa.precise["c6"] = moment_match(Family::kGamma, s6);
  PropagationOptions opt;
  opt.n = 50;
  opt.threads = 0;
  const Interval e = expected_interval(propagate_pboxes(m, box, opt).pbox);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Interval p = expected_interval(psa_propagate(m, psa, 500, seed, 0).pbox);
    EXPECT_EQ(p.lo, p.hi);
    EXPECT_TRUE(e.contains(p.lo)) << p.lo << " not in [" << e.lo << ", " << e.hi << "]";
  }
}

}  // namespace
}  // namespace pba
