#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "expect_error.hpp"
#include "pba/propagation.hpp"
#include "random_data.hpp"

namespace pba {
namespace {

using testing::kAllKinds;
using testing::probe_points;
using testing::random_data;

Model identity_model() {
  return {{"x"}, [](std::span<const double> x) { return x[0]; }};
}

// Largest gap between the step envelope of d and the analytic bounds.
double envelope_distance(const PBox& p, const DiscretizedPBox& d) {
  const Interval s = p.support();
  double gap = 0.0;
  for (double t : probe_points(s.lo, s.hi, 1000)) {
    gap = std::max(gap, eval_bound(p, Side::kLower, t) - discretized_cdf(d, Side::kLower, t));
    gap = std::max(gap, discretized_cdf(d, Side::kUpper, t) - eval_bound(p, Side::kUpper, t));
  }
  return gap;
}

TEST(DiscretizeOuter, MinMaxGivesFullSupportElements) {
  const DiscretizedPBox d = discretize_outer(build_pbox(MinMax{0, 1}), 4);
  ASSERT_EQ(d.elements.size(), 4u);
  for (const FocalElement& e : d.elements) {
    EXPECT_EQ(e.interval, (Interval{0, 1}));
    EXPECT_EQ(e.mass, 0.25);
  }
}

TEST(DiscretizeOuter, MedianSplitsAtMedian) {
  const DiscretizedPBox d = discretize_outer(build_pbox(MinMaxMedian{0, 1, 0.4}), 2);
  ASSERT_EQ(d.elements.size(), 2u);
  EXPECT_EQ(d.elements[0].interval, (Interval{0, 0.4}));
  EXPECT_EQ(d.elements[1].interval, (Interval{0.4, 1}));
  EXPECT_EQ(d.elements[0].mass, 0.5);
}

TEST(DiscretizeOuter, MeanRefines) {
  const PBox p = build_pbox(MinMaxMean{0, 1, 0.5});
  auto dist = [&](int n) {
    const DiscretizedPBox d = discretize_outer(p, n);
    double gap = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      gap = std::max(gap, std::abs(eval_bound(p, Side::kLower, t) -
                                   discretized_cdf(d, Side::kLower, t)));
      gap = std::max(gap, std::abs(eval_bound(p, Side::kUpper, t) -
                                   discretized_cdf(d, Side::kUpper, t)));
    }
    return gap;
  };
  EXPECT_LE(dist(10), dist(5));
}

TEST(DiscretizeOuter, RejectsZeroSlices) {
  EXPECT_PBA_ERROR(discretize_outer(build_pbox(MinMax{0, 1}), 0),
                   ErrorCode::kZeroSlices);
}

TEST(DiscretizeOuter, EnclosesEveryKind) {
  std::mt19937_64 rng(31);
  for (DataKind k : kAllKinds) {
    for (int rep = 0; rep < 40; ++rep) {
      const MinimalData data = random_data(rng, k);
      const PBox p = build_pbox(data);
      const Interval s = p.support();
      for (int n : {1, 2, 5, 10, 50}) {
        const DiscretizedPBox d = discretize_outer(p, n);
        ASSERT_EQ(d.elements.size(), static_cast<std::size_t>(n));
        double mass = 0.0;
        for (std::size_t j = 0; j < d.elements.size(); ++j) {
          const FocalElement& e = d.elements[j];
          mass += e.mass;
          EXPECT_GT(e.mass, 0.0);
          EXPECT_LE(e.interval.lo, e.interval.hi);
          EXPECT_GE(e.interval.lo, s.lo);
          EXPECT_LE(e.interval.hi, s.hi);
          if (j > 0) {
            EXPECT_LE(d.elements[j - 1].interval.lo, e.interval.lo);
            EXPECT_LE(d.elements[j - 1].interval.hi, e.interval.hi);
          }
        }
        EXPECT_NEAR(mass, 1.0, 1e-12);
        for (double t : probe_points(s.lo, s.hi, 1000)) {
          ASSERT_LE(discretized_cdf(d, Side::kLower, t),
                    eval_bound(p, Side::kLower, t) + 1e-12)
              << to_string(k) << " n=" << n << " t=" << t;
          ASSERT_GE(discretized_cdf(d, Side::kUpper, t),
                    eval_bound(p, Side::kUpper, t) - 1e-12)
              << to_string(k) << " n=" << n << " t=" << t;
        }
      }
    }
  }
}

TEST(DiscretizeOuter, DistanceShrinksAsSlicesDouble) {
  std::mt19937_64 rng(32);
  for (DataKind k : kAllKinds) {
    for (int rep = 0; rep < 20; ++rep) {
      const PBox p = build_pbox(random_data(rng, k));
      double prev = 2.0;
      for (int n = 1; n <= 64; n *= 2) {
        const double gap = envelope_distance(p, discretize_outer(p, n));
        EXPECT_LE(gap, prev + 1e-15) << to_string(k) << " n=" << n;
        EXPECT_LE(gap, 1.0 / n + 1e-12) << to_string(k) << " n=" << n;
        prev = gap;
      }
    }
  }
}

TEST(FocalProduct, CountsAndMasses) {
  const DiscretizedPBox two = discretize_outer(build_pbox(MinMaxMedian{0, 1, 0.4}), 2);
  const FocalProduct fp({two, two});
  ASSERT_EQ(fp.size(), 4u);
  double total = 0.0;
  std::size_t seen = 0;
  for (const Hyperrectangle& h : fp) {
    EXPECT_EQ(h.mass, 0.25);
    EXPECT_EQ(h.intervals.size(), 2u);
    EXPECT_EQ(h.intervals[0], two.elements[h.multi_index[0]].interval);
    EXPECT_EQ(h.intervals[1], two.elements[h.multi_index[1]].interval);
    total += h.mass;
    ++seen;
  }
  EXPECT_EQ(seen, 4u);
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(FocalProduct, ThreeFactorsOfFifty) {
  const DiscretizedPBox d = discretize_outer(build_pbox(MinMaxMean{0, 1, 0.3}), 50);
  const FocalProduct fp({d, d, d});
  ASSERT_EQ(fp.size(), 125000u);
  double total = 0.0;
  for (std::size_t k = 0; k < fp.size(); ++k) total += fp[k].mass;
  EXPECT_NEAR(total, 1.0, 1e-9);
  const Hyperrectangle last = fp[fp.size() - 1];
  EXPECT_EQ(last.multi_index, (std::vector<int>{49, 49, 49}));
}

TEST(FocalProduct, EmptyAndCap) {
  const FocalProduct none({});
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none[0].mass, 1.0);
  const DiscretizedPBox d = discretize_outer(build_pbox(MinMax{0, 1}), 10);
  EXPECT_PBA_ERROR(FocalProduct({d, d, d}, 999), ErrorCode::kTooManyHyperrectangles);
  EXPECT_EQ(FocalProduct({d, d, d}, 999, true).size(), 1000u);
}

TEST(EmpiricalPBox, StepsAndValidation) {
  const EmpiricalPBox e({{1, 3, 0.5}, {2, 4, 0.5}});
  EXPECT_EQ(e.upper(0.99), 0.0);
  EXPECT_EQ(e.upper(1.0), 0.5);
  EXPECT_EQ(e.upper(2.0), 1.0);
  EXPECT_EQ(e.lower(2.99), 0.0);
  EXPECT_EQ(e.lower(3.0), 0.5);
  EXPECT_EQ(e.lower(4.0), 1.0);
  EXPECT_EQ(e.support(), (Interval{1, 4}));
  EXPECT_EQ(e.jumps(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_PBA_ERROR(EmpiricalPBox({{1, 2, 0.5}}), ErrorCode::kInvalidArgument);
  EXPECT_PBA_ERROR(EmpiricalPBox({{2, 1, 1.0}}), ErrorCode::kInvalidArgument);
  const EmpiricalPBox s = EmpiricalPBox::from_samples({3, 1, 2, 2});
  EXPECT_EQ(s.lower(2.0), 0.75);
  EXPECT_EQ(s.upper(2.0), 0.75);
}

TEST(PropagatePBoxes, IdentityReproducesInput) {
  std::mt19937_64 rng(77);
  for (DataKind k : kAllKinds) {
    const MinimalData d = random_data(rng, k);
    const PBox p = build_pbox(d);
    for (int n : {10, 50}) {
      ParameterSet ps;
      ps.boxed["x"] = d;
      PropagationOptions opt;
      opt.n = n;
      const PropagationResult r = propagate_pboxes(identity_model(), ps, opt);
      EXPECT_EQ(r.boxes, static_cast<std::size_t>(n));
      const Interval s = p.support();
      const double quant = s.width() / 1000.0;
      for (double t : probe_points(s.lo, s.hi, 1000)) {
        // Ordering and sup-distance to the analytic envelope.
        ASSERT_LE(r.pbox.lower(t), r.pbox.upper(t));
        const double lo = std::min(eval_bound(p, Side::kLower, t - quant),
                                   eval_bound(p, Side::kLower, t));
        const double hi = std::max(eval_bound(p, Side::kUpper, t + quant),
                                   eval_bound(p, Side::kUpper, t));
        EXPECT_GE(r.pbox.lower(t), lo - 1.0 / n - 1e-9) << to_string(k);
        EXPECT_LE(r.pbox.upper(t), hi + 1.0 / n + 1e-9) << to_string(k);
      }
    }
  }
}

TEST(PropagatePBoxes, ConstantModelSteps) {
  const Model m{{"x"}, [](std::span<const double>) { return 2.5; }};
  ParameterSet ps;
  ps.boxed["x"] = MinMaxMean{0, 1, 0.5};
  PropagationOptions opt;
  opt.n = 5;
  const PropagationResult r = propagate_pboxes(m, ps, opt);
  EXPECT_EQ(r.pbox.lower(std::nextafter(2.5, 0.0)), 0.0);
  EXPECT_EQ(r.pbox.upper(std::nextafter(2.5, 0.0)), 0.0);
  EXPECT_EQ(r.pbox.lower(2.5), 1.0);
  EXPECT_EQ(r.pbox.upper(2.5), 1.0);
}

TEST(PropagatePBoxes, FixedInputsAndThreads) {
  const Model m{{"x", "k", "y"},
                [](std::span<const double> v) { return v[1] * v[0] - v[2]; }};
  ParameterSet ps;
  ps.boxed["x"] = MinMaxMedian{0, 2, 0.5};
  ps.boxed["y"] = MinMaxMean{1, 3, 1.5};
  ps.fixed["k"] = 3.0;
  PropagationOptions opt;
  opt.n = 8;
  const PropagationResult one = propagate_pboxes(m, ps, opt);
  opt.threads = 4;
  const PropagationResult four = propagate_pboxes(m, ps, opt);
  ASSERT_EQ(one.pbox.extrema().size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(one.pbox.extrema()[i].y_min, four.pbox.extrema()[i].y_min);
    EXPECT_EQ(one.pbox.extrema()[i].y_max, four.pbox.extrema()[i].y_max);
  }
  // Linear model: extremes at corners, support [0 - 3, 6 - 1].
  EXPECT_NEAR(one.pbox.support().lo, -3.0, 1e-5);
  EXPECT_NEAR(one.pbox.support().hi, 5.0, 1e-5);
  EXPECT_EQ(one.evaluations, four.evaluations);
}

TEST(PropagatePBoxes, Errors) {
  ParameterSet ps;
  ps.boxed["x"] = MinMax{0, 1};
  const Model needs_y{{"x", "y"}, [](std::span<const double> v) { return v[0]; }};
  EXPECT_PBA_ERROR(propagate_pboxes(needs_y, ps, {}), ErrorCode::kInvalidParameterSet);
  ParameterSet extra = ps;
  extra.fixed["z"] = 1.0;
  EXPECT_PBA_ERROR(propagate_pboxes(identity_model(), extra, {}),
                   ErrorCode::kInvalidParameterSet);
  ParameterSet twice = ps;
  twice.fixed["x"] = 1.0;
  EXPECT_PBA_ERROR(propagate_pboxes(identity_model(), twice, {}),
                   ErrorCode::kInvalidParameterSet);
  const Model bad{{"x"}, [](std::span<const double> v) -> double {
                    if (v[0] > 0.5) throw std::runtime_error("boom");
                    return v[0];
                  }};
  try {
    PropagationOptions opt;
    opt.n = 3;
    propagate_pboxes(bad, ps, opt);
    ADD_FAILURE() << "expected ModelEvaluationError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelEvaluationError);
    ASSERT_EQ(e.point().size(), 1u);
    EXPECT_GT(e.point()[0], 0.5);
  }
}

TEST(Psa, UniformMeanClt) {
  ParameterSet ps;
  ps.precise["x"] = UniformDist{2, 6};
  const int n = 2000;
  const PropagationResult r = psa_propagate(identity_model(), ps, n, 123);
  double sum = 0.0;
  for (const Extremum& e : r.pbox.extrema()) {
    EXPECT_EQ(e.y_min, e.y_max);
    EXPECT_EQ(e.mass, 1.0 / n);
    sum += e.y_min;
  }
  EXPECT_LE(std::abs(sum / n - 4.0), 3.0 * 4.0 / std::sqrt(12.0 * n));
}

TEST(Psa, GammaMeanClt) {
  ParameterSet ps;
  Statistics s;
  s.mean = 1.0;
  s.sd = 0.33;
  ps.precise["x"] = moment_match(Family::kGamma, s);
  const int n = 2000;
  const PropagationResult r = psa_propagate(identity_model(), ps, n, 9);
  double sum = 0.0;
  for (const Extremum& e : r.pbox.extrema()) sum += e.y_min;
  EXPECT_LE(std::abs(sum / n - 1.0), 3.0 * 0.33 / std::sqrt(n));
}

TEST(Psa, SeedDeterminism) {
  ParameterSet ps;
  ps.precise["x"] = BetaDist{2, 5};
  ps.precise["y"] = UniformDist{0, 1};
  const Model m{{"x", "y"}, [](std::span<const double> v) { return v[0] + 2 * v[1]; }};
  const PropagationResult a = psa_propagate(m, ps, 300, 5);
  const PropagationResult b = psa_propagate(m, ps, 300, 5, 4);
  const PropagationResult c = psa_propagate(m, ps, 300, 6);
  bool differs = false;
  for (std::size_t i = 0; i < 300; ++i) {
    EXPECT_EQ(a.pbox.extrema()[i].y_min, b.pbox.extrema()[i].y_min);
    differs = differs || a.pbox.extrema()[i].y_min != c.pbox.extrema()[i].y_min;
  }
  EXPECT_TRUE(differs);
  EXPECT_PBA_ERROR(psa_propagate(m, ParameterSet{{}, {{"x", GammaDist{-1, 1}}, {"y", UniformDist{0, 1}}}, {}}, 10, 1),
                   ErrorCode::kInvalidDistributionSpec);
}

TEST(Mixed, EmptyPreciseSetMatchesPurePipeline) {
  ParameterSet ps;
  ps.boxed["x"] = MinMaxMeanStd{0, 4, 1, 0.5};
  ps.fixed["k"] = 2.0;
  const Model m{{"x", "k"}, [](std::span<const double> v) { return v[0] * v[0] * v[1]; }};
  PropagationOptions opt;
  opt.n = 20;
  const PropagationResult pure = propagate_pboxes(m, ps, opt);
  const PropagationResult mixed = propagate_mixed(m, ps, 17, 3, opt);
  ASSERT_EQ(pure.pbox.extrema().size(), mixed.pbox.extrema().size());
  for (std::size_t i = 0; i < pure.pbox.extrema().size(); ++i) {
    EXPECT_EQ(pure.pbox.extrema()[i].y_min, mixed.pbox.extrema()[i].y_min);
    EXPECT_EQ(pure.pbox.extrema()[i].y_max, mixed.pbox.extrema()[i].y_max);
    EXPECT_EQ(pure.pbox.extrema()[i].mass, mixed.pbox.extrema()[i].mass);
  }
}

TEST(Mixed, EmptyBoxedSetMatchesPsa) {
  ParameterSet ps;
  ps.precise["x"] = GammaDist{3, 2};
  const PropagationResult mixed = propagate_mixed(identity_model(), ps, 200, 11, {});
  const PropagationResult psa = psa_propagate(identity_model(), ps, 200, 11);
  for (double y : psa.pbox.jumps()) {
    EXPECT_EQ(mixed.pbox.lower(y), mixed.pbox.upper(y));
    EXPECT_EQ(mixed.pbox.lower(y), psa.pbox.lower(y));
  }
}

// Double loop: reuse each outer sample, then place one point inside every
// focal element of the boxed input. Each point lies in its box's outcome
// range, so the resulting CDF must sit inside the averaged envelope.
TEST(Mixed, LinearModelEnclosesDoubleLoopOracle) {
  ParameterSet ps;
  ps.boxed["x"] = MinMaxMedian{0, 2, 0.5};
  Statistics s;
  s.mean = 1.0;
  s.sd = 0.3;
  ps.precise["g"] = moment_match(Family::kGamma, s);
  const Model m{{"g", "x"}, [](std::span<const double> v) { return v[0] + 3.0 * v[1]; }};
  PropagationOptions opt;
  opt.n = 50;
  const int samples = 200;
  const std::uint64_t seed = 99;
  const PropagationResult r = propagate_mixed(m, ps, samples, seed, opt);
  EXPECT_EQ(r.boxes, static_cast<std::size_t>(samples * opt.n));

  const DiscretizedPBox d = discretize_outer(build_pbox(ps.boxed["x"]), opt.n);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> ys;
  for (int i = 0; i < samples; ++i) {
    const double g = sample_precise(ps, seed, i).at("g");
    for (const FocalElement& e : d.elements) {
      const double x = e.interval.lo + u(rng) * e.interval.width();
      ys.push_back(g + 3.0 * x);
    }
  }
  const EmpiricalPBox oracle = EmpiricalPBox::from_samples(ys);
  for (double y : oracle.jumps()) {
    EXPECT_GE(oracle.lower(y), r.pbox.lower(y) - 1e-9) << y;
    EXPECT_LE(oracle.lower(y), r.pbox.upper(y) + 1e-9) << y;
  }
  // Averaged bounds reach exactly 0 and 1 at the support ends.
  const Interval sup = r.pbox.support();
  EXPECT_EQ(r.pbox.upper(std::nextafter(sup.lo, -1e300)), 0.0);
  EXPECT_EQ(r.pbox.lower(sup.hi), 1.0);
}

// Enclosure of a precise law consistent with the data, for every kind.
TEST(Mixed, PsaOfConsistentLawInsideEnvelope) {
  std::mt19937_64 rng(500);
  for (DataKind k : kAllKinds) {
    for (int rep = 0; rep < 10; ++rep) {
      const MinimalData d = random_data(rng, k);
      const testing::DiscreteDist law = testing::random_consistent(rng, d);
      ParameterSet ps;
      ps.boxed["x"] = d;
      PropagationOptions opt;
      opt.n = 10;
      const PropagationResult r = propagate_pboxes(identity_model(), ps, opt);
      // Inverse-transform sampling of the discrete law.
      std::vector<std::size_t> idx(law.x.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](auto l, auto r2) { return law.x[l] < law.x[r2]; });
      std::vector<double> ys;
      for (int i = 0; i < 500; ++i) {
        SampleStream st(rep, i);
        const double v = st.uniform();
        double run = 0.0;
        double y = law.x[idx.back()];
        for (std::size_t j : idx) {
          run += law.p[j];
          if (v <= run) {
            y = law.x[j];
            break;
          }
        }
        ys.push_back(y);
      }
      const EmpiricalPBox psa = EmpiricalPBox::from_samples(ys);
      // Box extremes are found to the optimizer tolerance, so atoms sitting
      // exactly on a box corner are compared with that much horizontal room.
      const double h = 1e-5 * support(d).width();
      for (double y : ys) {
        EXPECT_GE(psa.lower(y), r.pbox.lower(y - h) - 2.0 / opt.n) << to_string(k);
        EXPECT_LE(psa.lower(y), r.pbox.upper(y + h) + 2.0 / opt.n) << to_string(k);
      }
    }
  }
}

}  // namespace
}  // namespace pba
