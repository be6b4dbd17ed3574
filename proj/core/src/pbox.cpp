#include "pba/pbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "pba/error.hpp"

namespace pba {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEmptyTol = 1e-12;
constexpr double kTieTol = 1e-14;
constexpr int kCrossingSamples = 256;

using Piece = std::pair<double, BoundExpr>;
using Pieces = std::vector<Piece>;

BoundExpr K(double v) { return BoundExpr::constant(v); }

Bound make(const Pieces& pieces) { return Bound::from_pieces(pieces); }

double clamp01(double v) {
  if (std::isnan(v)) return v;
  return std::clamp(v, 0.0, 1.0);
}

PBox build_minmax(const MinMax& d) {
  Bound lower = make({{-kInf, K(0)}, {d.b, K(1)}});
  Bound upper = make({{-kInf, K(0)}, {d.a, K(1)}});
  return PBox(lower, upper, {d.a, d.b}, d);
}

PBox build_median(const MinMaxMedian& d) {
  const double m = d.median;
  Bound lower = make({{-kInf, K(0)}, {m, K(0.5)}, {d.b, K(1)}});
  Bound upper = make({{-kInf, K(0)}, {d.a, K(0.5)}, {m, K(1)}});
  return PBox(lower, upper, {d.a, d.b}, d);
}

Pieces mean_lower_pieces(double a, double b, double mu) {
  if (mu == a) return {{-kInf, K(0)}, {a, K(1)}};
  return {{-kInf, K(0)}, {mu, BoundExpr::mean_lower(a, mu)}, {b, K(1)}};
}

Pieces mean_upper_pieces(double a, double b, double mu) {
  if (mu == b) return {{-kInf, K(0)}, {b, K(1)}};
  return {{-kInf, K(0)}, {a, BoundExpr::mean_upper(b, mu)}, {mu, K(1)}};
}

PBox build_mean(const MinMaxMean& d) {
  Bound lower = make(mean_lower_pieces(d.a, d.b, d.mean));
  Bound upper = make(mean_upper_pieces(d.a, d.b, d.mean));
  return PBox(lower, upper, {d.a, d.b}, d);
}

PBox build_mean_std(const MinMaxMeanStd& d) {
  const double a = d.a, b = d.b, mu = d.mean, s = d.sd;
  const double var = s * s;
  const double vmax = max_variance(a, b, mu);
  if (var == 0.0 || mu == a || mu == b) {
    Bound step = make({{-kInf, K(0)}, {mu, K(1)}});
    return PBox(step, step, {a, b}, d);
  }
  if (var >= vmax * (1.0 - kVarianceRelTol)) {
    // Only the two-point distribution on {a, b} remains.
    Bound two = make({{-kInf, K(0)}, {a, K((b - mu) / (b - a))}, {b, K(1)}});
    return PBox(two, two, {a, b}, d);
  }
  const double xi1 = mu - var / (b - mu);
  const double xi2 = mu + var / (mu - a);
  Bound lower = make({{-kInf, K(0)},
                      {xi1, BoundExpr::std_lower_mid(a, b, mu, s)},
                      {xi2, BoundExpr::std_lower_right(mu, s)},
                      {b, K(1)}});
  Bound upper = make({{-kInf, K(0)},
                      {a, BoundExpr::std_upper_left(mu, s)},
                      {xi1, BoundExpr::std_upper_mid(a, b, mu, s)},
                      {xi2, K(1)}});
  return PBox(lower, upper, {a, b}, d);
}

// Eleven cases on (m vs mu, mu vs c, mu vs the extreme means), tested in
// order. Each equals the intersection of the median box and the mean box.
PBox build_median_mean(const MinMaxMedianMean& d) {
  const double a = d.a, b = d.b, m = d.median, mu = d.mean;
  const double c = 0.5 * (a + b);
  const double gamma = 2.0 * mu - a;
  const double psi = 2.0 * mu - b;
  const double mu_min = 0.5 * (a + m);
  const double mu_max = 0.5 * (m + b);
  const BoundExpr ml = BoundExpr::mean_lower(a, mu);
  const BoundExpr mu_up = BoundExpr::mean_upper(b, mu);
  const BoundExpr zero = K(0), half = K(0.5), one = K(1);

  const Pieces l_half_ml = {{-kInf, zero}, {m, half}, {gamma, ml}, {b, one}};
  const Pieces l_half = {{-kInf, zero}, {m, half}, {b, one}};
  const Pieces u_half_mu = {{-kInf, zero}, {a, half}, {m, mu_up}, {mu, one}};
  const Pieces u_mu_half_mu = {
      {-kInf, zero}, {a, mu_up}, {psi, half}, {m, mu_up}, {mu, one}};
  const Pieces u_mu = {{-kInf, zero}, {a, mu_up}, {mu, one}};
  const Pieces u_half = {{-kInf, zero}, {a, half}, {m, one}};
  const Pieces u_mu_half = {{-kInf, zero}, {a, mu_up}, {psi, half}, {m, one}};
  const Pieces l_ml = {{-kInf, zero}, {mu, ml}, {b, one}};
  const Pieces l_ml_half_ml = {
      {-kInf, zero}, {mu, ml}, {m, half}, {gamma, ml}, {b, one}};
  const Pieces l_ml_half = {{-kInf, zero}, {mu, ml}, {m, half}, {b, one}};

  const Pieces* lo = nullptr;
  const Pieces* up = nullptr;
  if (m < mu) {
    if (mu < c) {
      lo = &l_half_ml, up = &u_half_mu;  // 1
    } else if (mu == c) {
      lo = &l_half, up = &u_half_mu;  // 2
    } else if (mu < mu_max) {
      lo = &l_half, up = &u_mu_half_mu;  // 3
    } else {
      lo = &l_half, up = &u_mu;  // 4
    }
  } else if (m == mu) {
    if (mu < c) {
      lo = &l_half_ml, up = &u_half;  // 5
    } else if (mu == c) {
      lo = &l_half, up = &u_half;  // 6
    } else {
      lo = &l_half, up = &u_mu_half;  // 7
    }
  } else {
    if (mu == mu_min) {
      lo = &l_ml, up = &u_half;  // 8
    } else if (mu < c) {
      lo = &l_ml_half_ml, up = &u_half;  // 9
    } else if (mu == c) {
      lo = &l_ml_half, up = &u_half;  // 10
    } else {
      lo = &l_ml_half, up = &u_mu_half;  // 11
    }
  }
  // mu == a forces m == a; mu == b forces m == b. Closed forms are 0/0 there.
  if (mu == a) lo = nullptr;
  if (mu == b) up = nullptr;
  Bound lower = lo ? make(*lo) : make(mean_lower_pieces(a, b, mu));
  Bound upper = up ? make(*up) : make(mean_upper_pieces(a, b, mu));
  return PBox(lower, upper, {a, b}, d);
}

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

// inf{t in [a,b] : F(t) >= p} (or > p when strict); nullopt when empty.
std::optional<double> first_reaching(const Bound& f, double p, bool strict,
                                     double a, double b) {
  auto meets = [&](double v) { return strict ? v > p : v >= p; };
  for (const BoundSegment& s : f.segments()) {
    const double lo = std::max(s.lo, a);
    const double hi = std::min(s.hi, b);
    if (lo > b) break;
    if (s.hi <= a) continue;
    if (meets(f(lo))) return lo;
    if (s.expr.kind == BoundExpr::Kind::kConstant || !(lo < hi)) continue;
    // Monotone bisection between a failing left end and a meeting right
    // end, seeded by the closed-form inverse.
    double right = std::nextafter(hi, lo);
    if (!meets(f(right))) continue;
    double left = lo;
    const double t = s.expr.inverse(p);
    if (t > left && t < right) {
      if (meets(f(t))) {
        right = t;
      } else {
        left = t;
      }
    }
    for (;;) {
      const double mid = left + 0.5 * (right - left);
      if (!(mid > left && mid < right)) break;
      if (meets(f(mid))) {
        right = mid;
      } else {
        left = mid;
      }
    }
    return right;
  }
  return std::nullopt;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

const BoundExpr& active_expr(const Bound& f, double t) {
  const auto& segs = f.segments();
  auto it = std::upper_bound(
      segs.begin(), segs.end(), t,
      [](double x, const BoundSegment& s) { return x < s.lo; });
  return std::prev(it)->expr;
}

// Zero of g - h on [lo, hi] given a sign change.
double bisect(const BoundExpr& g, const BoundExpr& h, double lo, double hi) {
  double flo = g(lo) - h(lo);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = g(mid) - h(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return hi;
}

// Pointwise max (lower side) or min (upper side) of several bounds.
Bound envelope(const std::vector<const Bound*>& fs, bool take_max) {
  std::vector<double> knots;
  for (const Bound* f : fs) {
    for (double x : f->breakpoints()) knots.push_back(x);
  }
  knots = sorted_unique(std::move(knots));

  auto better = [&](double u, double v) {
    return take_max ? u > v + kTieTol : u < v - kTieTol;
  };
  auto pick = [&](const std::vector<BoundExpr>& cands, double t) {
    std::size_t best = 0;
    double bv = clamp01(cands[0](t));
    for (std::size_t i = 1; i < cands.size(); ++i) {
      const double v = clamp01(cands[i](t));
      const bool tie = std::abs(v - bv) <= kTieTol;
      if (better(v, bv) || (tie && cands[i].kind < cands[best].kind)) {
        best = i;
        bv = v;
      }
    }
    return cands[best];
  };

  Pieces out;
  if (knots.empty()) {
    std::vector<BoundExpr> cands;
    for (const Bound* f : fs) cands.push_back(active_expr(*f, 0.0));
    out.push_back({-kInf, pick(cands, 0.0)});
    return Bound::from_pieces(out);
  }
  for (std::size_t k = 0; k <= knots.size(); ++k) {
    const double lo = k == 0 ? -kInf : knots[k - 1];
    const double hi = k == knots.size() ? kInf : knots[k];
    const double probe = k == 0               ? hi - 1.0
                         : k == knots.size() ? lo + 1.0
                                             : 0.5 * (lo + hi);
    std::vector<BoundExpr> cands;
    for (const Bound* f : fs) {
      const BoundExpr& e = active_expr(*f, probe);
      if (std::find(cands.begin(), cands.end(), e) == cands.end()) {
        cands.push_back(e);
      }
    }
    std::vector<double> cuts{lo};
    if (std::isfinite(lo) && std::isfinite(hi) && cands.size() > 1) {
      for (std::size_t i = 0; i < cands.size(); ++i) {
        for (std::size_t j = i + 1; j < cands.size(); ++j) {
          const BoundExpr& g = cands[i];
          const BoundExpr& h = cands[j];
          double xprev = lo;
          double dprev = g(lo) - h(lo);
          for (int s = 1; s <= kCrossingSamples; ++s) {
            const double x =
                s == kCrossingSamples ? hi : lo + (hi - lo) * s / kCrossingSamples;
            const double dx = g(x) - h(x);
            if (dx == 0.0 && x < hi) {
              cuts.push_back(x);
            } else if (std::isfinite(dprev) && std::isfinite(dx) &&
                       ((dprev < 0.0 && dx > 0.0) || (dprev > 0.0 && dx < 0.0))) {
              const double z = bisect(g, h, xprev, x);
              if (z > lo && z < hi) cuts.push_back(z);
            }
            xprev = x;
            dprev = dx;
          }
        }
      }
    }
    cuts = sorted_unique(std::move(cuts));
    for (std::size_t q = 0; q < cuts.size(); ++q) {
      const double s0 = cuts[q];
      const double s1 = q + 1 < cuts.size() ? cuts[q + 1] : hi;
      double t;
      if (!std::isfinite(s0)) {
        t = s1 - 1.0;
      } else if (!std::isfinite(s1)) {
        t = s0 + 1.0;
      } else {
        t = 0.5 * (s0 + s1);
      }
      out.push_back({s0, pick(cands, t)});
    }
  }
  return Bound::from_pieces(out);
}

}  // namespace

// ---- BoundExpr -------------------------------------------------------------

BoundExpr BoundExpr::constant(double v) {
  BoundExpr e;
  e.kind = Kind::kConstant;
  e.value = v;
  return e;
}

BoundExpr BoundExpr::mean_lower(double a, double mu) {
  BoundExpr e;
  e.kind = Kind::kMeanLower;
  e.a = a;
  e.mu = mu;
  return e;
}

BoundExpr BoundExpr::mean_upper(double b, double mu) {
  BoundExpr e;
  e.kind = Kind::kMeanUpper;
  e.b = b;
  e.mu = mu;
  return e;
}

BoundExpr BoundExpr::std_lower_mid(double a, double b, double mu,
                                   double sigma) {
  BoundExpr e;
  e.kind = Kind::kStdLowerMid;
  e.a = a;
  e.b = b;
  e.mu = mu;
  e.sigma = sigma;
  return e;
}

BoundExpr BoundExpr::std_lower_right(double mu, double sigma) {
  BoundExpr e;
  e.kind = Kind::kStdLowerRight;
  e.mu = mu;
  e.sigma = sigma;
  return e;
}

BoundExpr BoundExpr::std_upper_left(double mu, double sigma) {
  BoundExpr e;
  e.kind = Kind::kStdUpperLeft;
  e.mu = mu;
  e.sigma = sigma;
  return e;
}

BoundExpr BoundExpr::std_upper_mid(double a, double b, double mu,
                                   double sigma) {
  BoundExpr e;
  e.kind = Kind::kStdUpperMid;
  e.a = a;
  e.b = b;
  e.mu = mu;
  e.sigma = sigma;
  return e;
}

double BoundExpr::operator()(double t) const {
  const double s2 = sigma * sigma;
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kMeanLower:
      return (t - mu) / (t - a);
    case Kind::kMeanUpper:
      return (b - mu) / (b - t);
    case Kind::kStdLowerMid:
      return (s2 + (b - mu) * (t - mu)) / ((b - a) * (t - a));
    case Kind::kStdLowerRight: {
      const double d2 = (t - mu) * (t - mu);
      return d2 / (d2 + s2);
    }
    case Kind::kStdUpperLeft: {
      const double d2 = (mu - t) * (mu - t);
      return s2 / (d2 + s2);
    }
    case Kind::kStdUpperMid:
      return ((b - mu) * (b - a + mu - t) - s2) / ((b - a) * (b - t));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double BoundExpr::inverse(double p) const {
  const double s2 = sigma * sigma;
  switch (kind) {
    case Kind::kConstant:
      return std::numeric_limits<double>::quiet_NaN();
    case Kind::kMeanLower:
      return p >= 1.0 ? kInf : (mu - p * a) / (1.0 - p);
    case Kind::kMeanUpper:
      return p <= 0.0 ? -kInf : b - (b - mu) / p;
    case Kind::kStdLowerMid:
      return (p * a * (b - a) - mu * (b - mu) + s2) /
             (p * (b - a) - (b - mu));
    case Kind::kStdLowerRight:
      return p >= 1.0 ? kInf : mu + sigma * std::sqrt(p / (1.0 - p));
    case Kind::kStdUpperLeft:
      return p <= 0.0 ? -kInf : mu - sigma * std::sqrt((1.0 - p) / p);
    case Kind::kStdUpperMid:
      return ((b - mu) * (b - a + mu) - s2 - p * b * (b - a)) /
             ((b - mu) - p * (b - a));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---- Bound -----------------------------------------------------------------

Bound Bound::from_pieces(std::span<const std::pair<double, BoundExpr>> pieces) {
  Pieces st;
  for (const auto& pc : pieces) {
    while (!st.empty() && pc.first <= st.back().first) st.pop_back();
    st.push_back(pc);
  }
  if (st.empty() || st.front().first != -kInf) {
    st.insert(st.begin(), {-kInf, K(0)});
  }
  Pieces merged;
  for (const auto& pc : st) {
    if (!merged.empty() && merged.back().second == pc.second) continue;
    merged.push_back(pc);
  }
  Bound f;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const double hi = i + 1 < merged.size() ? merged[i + 1].first : kInf;
    f.segments_.push_back({merged[i].first, hi, merged[i].second});
  }
  return f;
}

std::size_t Bound::locate(double t) const {
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double x, const BoundSegment& s) { return x < s.lo; });
  return static_cast<std::size_t>(std::prev(it) - segments_.begin());
}

double Bound::operator()(double t) const {
  const BoundExpr& e = segments_[locate(t)].expr;
  if (e.kind == BoundExpr::Kind::kConstant) return e.value;
  return clamp01(e(t));
}

double Bound::left_limit(double t) const {
  std::size_t i = locate(t);
  if (i > 0 && segments_[i].lo == t) --i;
  const BoundExpr& e = segments_[i].expr;
  if (e.kind == BoundExpr::Kind::kConstant) return e.value;
  return clamp01(e(t));
}

std::vector<double> Bound::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    out.push_back(segments_[i].lo);
  }
  return out;
}

// ---- PBox ------------------------------------------------------------------

PBox::PBox(Bound lower, Bound upper, Interval support,
           std::optional<MinimalData> source)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      support_(support),
      source_(std::move(source)) {}

PBox build_pbox(const MinimalData& d) {
  const MinimalData v = validate_minimal_data(d);
  return std::visit(
      Overload{
          [](const MinMax& x) { return build_minmax(x); },
          [](const MinMaxMedian& x) { return build_median(x); },
          [](const MinMaxMean& x) { return build_mean(x); },
          [](const MinMaxMeanStd& x) { return build_mean_std(x); },
          [](const MinMaxMedianMean& x) { return build_median_mean(x); },
      },
      v);
}

double eval_bound(const PBox& p, Side side, double theta) {
  return p.bound(side)(theta);
}

Interval quasi_inverse(const PBox& p, Side side, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw Error(ErrorCode::kProbabilityOutOfRange,
                "probability " + std::to_string(prob) + " outside [0, 1]");
  }
  const Bound& f = p.bound(side);
  const Interval s = p.support();
  const double lo = first_reaching(f, prob, false, s.lo, s.hi).value_or(s.hi);
  if (f(lo) != prob) return {lo, lo};
  const double hi = first_reaching(f, prob, true, s.lo, s.hi).value_or(s.hi);
  return {lo, std::max(lo, hi)};
}

PBox intersect_pboxes(std::span<const PBox> ps) {
  if (ps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "intersection of zero p-boxes");
  }
  const Interval s = ps.front().support();
  std::vector<const Bound*> lowers, uppers;
  for (const PBox& p : ps) {
    if (!(p.support() == s)) {
      throw Error(ErrorCode::kMismatchedSupports,
                  "p-boxes with different supports cannot be intersected");
    }
    lowers.push_back(&p.lower());
    uppers.push_back(&p.upper());
  }
  if (ps.size() == 1) return ps.front();
  Bound lower = envelope(lowers, true);
  Bound upper = envelope(uppers, false);

  std::vector<double> knots = lower.breakpoints();
  for (double x : upper.breakpoints()) knots.push_back(x);
  knots = sorted_unique(std::move(knots));
  std::vector<double> probes = knots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    probes.push_back(0.5 * (knots[i] + knots[i + 1]));
  }
  for (double t : probes) {
    if (lower(t) > upper(t) + kEmptyTol) {
      throw Error(ErrorCode::kEmptyBox,
                  "lower bound exceeds upper bound at theta = " +
                      std::to_string(t),
                  {t});
    }
  }
  return PBox(std::move(lower), std::move(upper), s, std::nullopt);
}

}  // namespace pba
