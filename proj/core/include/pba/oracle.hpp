#pragma once

#include <span>
#include <vector>

#include "pba/interval.hpp"
#include "pba/minimal_data.hpp"

namespace pba {

// Brute-force CDF bounds: min and max of F(theta) over every discrete
// distribution on a uniform grid of `gridsize` points over [a, b] that
// satisfies the constraints in d. Extremes of a linear functional over this
// polytope sit at basic solutions, i.e. supports of at most three points, so
// only those are enumerated. Independent of the analytic constructors.
Interval oracle_cdf_bounds(const MinimalData& d, double theta, int gridsize);

// Same enumeration, reused across several theta values.
std::vector<Interval> oracle_cdf_bounds(const MinimalData& d,
                                        std::span<const double> thetas,
                                        int gridsize);

}  // namespace pba
