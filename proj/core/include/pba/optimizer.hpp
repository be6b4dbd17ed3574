#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pba/interval.hpp"

namespace pba {

using Objective = std::function<double(std::span<const double>)>;

enum class Sense { kMin, kMax };

struct SearchBox {
  std::vector<Interval> bounds;
  int budget = 2000;
  double tol = 1e-6;
};

struct OptimizeResult {
  std::vector<double> argpoint;
  double value = 0.0;
  // False when the budget ran out before the best rectangle shrank below
  // tol times the box diameter.
  bool converged = false;
  int evaluations = 0;
};

// DIRECT (dividing rectangles), locally biased: every iteration trisects,
// per diameter class, the best rectangle lying on the lower-right convex
// hull of (diameter, value). Zero-width coordinates are held fixed.
OptimizeResult optimize_box(const Objective& f, const SearchBox& box,
                            Sense sense);

struct VertexExtrema {
  double min = 0.0;
  double max = 0.0;
  int evaluations = 0;
};

// Evaluates f at all 2^dim corners. Exact for objectives monotone in each
// coordinate.
VertexExtrema vertex_extrema(const Objective& f, const SearchBox& box,
                             int max_dim = 20);

}  // namespace pba
