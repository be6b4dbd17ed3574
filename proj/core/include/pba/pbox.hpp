#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pba/interval.hpp"
#include "pba/minimal_data.hpp"

namespace pba {

enum class Side { kLower, kUpper };

// Closed-form piece of a bounding function. Kinds are ordered from the
// analytically simplest; ties during intersection keep the lower kind.
struct BoundExpr {
  enum class Kind {
    kConstant,       // v
    kMeanLower,      // (t - mu) / (t - a)
    kMeanUpper,      // (b - mu) / (b - t)
    kStdLowerMid,    // (s^2 + (b - mu)(t - mu)) / ((b - a)(t - a))
    kStdLowerRight,  // (t - mu)^2 / ((t - mu)^2 + s^2)
    kStdUpperLeft,   // s^2 / ((mu - t)^2 + s^2)
    kStdUpperMid,    // ((b - mu)(b - a + mu - t) - s^2) / ((b - a)(b - t))
  };

  Kind kind = Kind::kConstant;
  double value = 0.0;
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double sigma = 0.0;

  static BoundExpr constant(double v);
  static BoundExpr mean_lower(double a, double mu);
  static BoundExpr mean_upper(double b, double mu);
  static BoundExpr std_lower_mid(double a, double b, double mu, double sigma);
  static BoundExpr std_lower_right(double mu, double sigma);
  static BoundExpr std_upper_left(double mu, double sigma);
  static BoundExpr std_upper_mid(double a, double b, double mu, double sigma);

  // Raw closed form, unclamped.
  double operator()(double t) const;

  // Solves expr(t) = p for a strictly increasing expression. Only meaningful
  // for non-constant kinds; may return a value outside the piece's interval.
  double inverse(double p) const;

  friend bool operator==(const BoundExpr&, const BoundExpr&) = default;
};

// Piece of a bounding function, valid on [lo, hi).
struct BoundSegment {
  double lo;
  double hi;
  BoundExpr expr;
};

// Right-continuous, non-decreasing step/analytic function tiling the real
// line: first segment starts at -inf, last one ends at +inf.
class Bound {
 public:
  // Pieces are (start, expr); a later start at or before an earlier one
  // replaces it. Adjacent equal expressions merge.
  static Bound from_pieces(std::span<const std::pair<double, BoundExpr>> pieces);

  double operator()(double t) const;
  // Limit from the left at t.
  double left_limit(double t) const;

  const std::vector<BoundSegment>& segments() const { return segments_; }
  // Interior segment starts (finite).
  std::vector<double> breakpoints() const;

 private:
  std::vector<BoundSegment> segments_;
  std::size_t locate(double t) const;
};

class PBox {
 public:
  PBox(Bound lower, Bound upper, Interval support,
       std::optional<MinimalData> source);

  const Bound& lower() const { return lower_; }
  const Bound& upper() const { return upper_; }
  const Bound& bound(Side side) const {
    return side == Side::kLower ? lower_ : upper_;
  }
  Interval support() const { return support_; }
  // Data the box was built from; empty for intersections.
  const std::optional<MinimalData>& source() const { return source_; }

 private:
  Bound lower_;
  Bound upper_;
  Interval support_;
  std::optional<MinimalData> source_;
};

PBox build_pbox(const MinimalData& d);

double eval_bound(const PBox& p, Side side, double theta);

// Set-valued inverse of one bound restricted to the support:
// lo = inf{t in [a,b] : F(t) >= prob}; when F(lo) == prob the level set
// extends to hi = inf{t : F(t) > prob} (b when F never exceeds prob).
Interval quasi_inverse(const PBox& p, Side side, double prob);

// Pointwise max of lower bounds and min of upper bounds.
PBox intersect_pboxes(std::span<const PBox> ps);

}  // namespace pba
