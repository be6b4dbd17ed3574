#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "pba/minimal_data.hpp"

namespace pba {

struct GammaDist {
  double shape;
  double rate;
};

// Standard beta on [0, 1].
struct BetaDist {
  double alpha;
  double beta;
};

struct UniformDist {
  double a;
  double b;
};

// Piecewise-linear CDF through (x[i], cdf[i]); x strictly increasing, cdf
// non-decreasing from 0 to 1.
struct TabulatedDist {
  std::vector<double> x;
  std::vector<double> cdf;
};

using DistributionSpec =
    std::variant<GammaDist, BetaDist, UniformDist, TabulatedDist>;

enum class Family { kGamma, kBeta, kUniform };

// Native parameters reproducing the given statistics: gamma and beta use
// mean and sd, uniform uses the support.
DistributionSpec moment_match(Family family, const Statistics& stats);

// Throws InvalidDistributionSpec unless parameters are usable.
void validate_distribution(const DistributionSpec& d);

// Inverse CDF at u in (0, 1).
double quantile(const DistributionSpec& d, double u);

double mean(const DistributionSpec& d);

// Independent uniform stream for one Monte Carlo sample. The state depends
// only on (seed, index), so results do not depend on evaluation order.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index);
  // Uniform on the open interval (0, 1).
  double uniform();

 private:
  std::mt19937_64 rng_;
};

}  // namespace pba
