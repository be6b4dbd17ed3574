#include "pba/distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "pba/error.hpp"

namespace pba {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

[[noreturn]] void bad_spec(const std::string& msg) {
  throw Error(ErrorCode::kInvalidDistributionSpec, msg);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

DistributionSpec moment_match(Family family, const Statistics& stats) {
  switch (family) {
    case Family::kUniform:
      if (!(std::isfinite(stats.a) && std::isfinite(stats.b) &&
            stats.a < stats.b)) {
        bad_spec("uniform needs min < max");
      }
      return UniformDist{stats.a, stats.b};
    case Family::kGamma: {
      if (!stats.mean || !stats.sd) bad_spec("gamma needs mean and sd");
      const double mu = *stats.mean, s = *stats.sd;
      if (!(mu > 0.0) || !(s > 0.0) || !std::isfinite(mu) ||
          !std::isfinite(s)) {
        throw Error(ErrorCode::kInfeasibleMoments,
                    "gamma needs positive mean and sd");
      }
      const double var = s * s;
      return GammaDist{mu * mu / var, mu / var};
    }
    case Family::kBeta: {
      if (!stats.mean || !stats.sd) bad_spec("beta needs mean and sd");
      const double mu = *stats.mean, var = *stats.sd * *stats.sd;
      if (!(mu > 0.0 && mu < 1.0) || !(var > 0.0) ||
          !(var < mu * (1.0 - mu))) {
        throw Error(ErrorCode::kInfeasibleMoments,
                    "beta needs 0 < mean < 1 and 0 < var < mean(1-mean)");
      }
      const double nu = mu * (1.0 - mu) / var - 1.0;
      return BetaDist{mu * nu, (1.0 - mu) * nu};
    }
  }
  bad_spec("unknown family");
}

void validate_distribution(const DistributionSpec& d) {
  std::visit(
      Overload{
          [](const GammaDist& g) {
            if (!positive_finite(g.shape) || !positive_finite(g.rate)) {
              bad_spec("gamma shape and rate must be positive");
            }
          },
          [](const BetaDist& b) {
            if (!positive_finite(b.alpha) || !positive_finite(b.beta)) {
              bad_spec("beta alpha and beta must be positive");
            }
          },
          [](const UniformDist& u) {
            if (!(std::isfinite(u.a) && std::isfinite(u.b) && u.a < u.b)) {
              bad_spec("uniform needs finite a < b");
            }
          },
          [](const TabulatedDist& t) {
            if (t.x.size() < 2 || t.x.size() != t.cdf.size()) {
              bad_spec("tabulated CDF needs >= 2 matching points");
            }
            for (std::size_t i = 0; i < t.x.size(); ++i) {
              if (!std::isfinite(t.x[i]) || !std::isfinite(t.cdf[i])) {
                bad_spec("tabulated CDF has non-finite entries");
              }
              if (i > 0 && !(t.x[i] > t.x[i - 1])) {
                bad_spec("tabulated x must be strictly increasing");
              }
              if (i > 0 && t.cdf[i] < t.cdf[i - 1]) {
                bad_spec("tabulated CDF must be non-decreasing");
              }
            }
            if (t.cdf.front() != 0.0 || t.cdf.back() != 1.0) {
              bad_spec("tabulated CDF must run from 0 to 1");
            }
          },
      },
      d);
}

double quantile(const DistributionSpec& d, double u) {
  return std::visit(
      Overload{
          [u](const GammaDist& g) {
            return boost::math::gamma_p_inv(g.shape, u) / g.rate;
          },
          [u](const BetaDist& b) {
            return boost::math::ibeta_inv(b.alpha, b.beta, u);
          },
          [u](const UniformDist& un) { return un.a + u * (un.b - un.a); },
          [u](const TabulatedDist& t) {
            auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
            const std::size_t k = static_cast<std::size_t>(it - t.cdf.begin());
            if (k == 0) return t.x.front();
            if (k >= t.cdf.size()) return t.x.back();
            const double f0 = t.cdf[k - 1], f1 = t.cdf[k];
            const double w = f1 > f0 ? (u - f0) / (f1 - f0) : 1.0;
            return t.x[k - 1] + w * (t.x[k] - t.x[k - 1]);
          },
      },
      d);
}

double mean(const DistributionSpec& d) {
  return std::visit(
      Overload{
          [](const GammaDist& g) { return g.shape / g.rate; },
          [](const BetaDist& b) { return b.alpha / (b.alpha + b.beta); },
          [](const UniformDist& un) { return 0.5 * (un.a + un.b); },
          [](const TabulatedDist& t) {
            double m = 0.0;
            for (std::size_t i = 1; i < t.x.size(); ++i) {
              m += (t.cdf[i] - t.cdf[i - 1]) * 0.5 * (t.x[i] + t.x[i - 1]);
            }
            return m;
          },
      },
      d);
}

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  rng_.seed(seq);
}

double SampleStream::uniform() {
  return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace pba
