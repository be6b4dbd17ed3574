#include "pba/minimal_data.hpp"

#include <cmath>
#include <sstream>
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

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

DataKind kind_of(const MinimalData& d) {
  return static_cast<DataKind>(d.index());
}

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::kMinMax: return "minmax";
    case DataKind::kMedian: return "median";
    case DataKind::kMean: return "mean";
    case DataKind::kMeanStd: return "mean-std";
    case DataKind::kMedianMean: return "median-mean";
  }
  return "unknown";
}

Statistics statistics(const MinimalData& d) {
  return std::visit(
      Overload{
          [](const MinMax& x) { return Statistics{x.a, x.b, {}, {}, {}}; },
          [](const MinMaxMedian& x) {
            return Statistics{x.a, x.b, x.median, {}, {}};
          },
          [](const MinMaxMean& x) {
            return Statistics{x.a, x.b, {}, x.mean, {}};
          },
          [](const MinMaxMeanStd& x) {
            return Statistics{x.a, x.b, {}, x.mean, x.sd};
          },
          [](const MinMaxMedianMean& x) {
            return Statistics{x.a, x.b, x.median, x.mean, {}};
          },
      },
      d);
}

Interval support(const MinimalData& d) {
  const Statistics s = statistics(d);
  return {s.a, s.b};
}

double max_variance(double a, double b, double mean) {
  return (b - mean) * (mean - a);
}

MinimalData validate_minimal_data(const MinimalData& d) {
  const Statistics s = statistics(d);
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(s.a) || !finite(s.b)) {
    throw Error(ErrorCode::kStatisticOutOfRange, "support must be finite");
  }
  if (!(s.a < s.b)) {
    throw Error(ErrorCode::kReversedBounds,
                "min " + fmt(s.a) + " must be below max " + fmt(s.b));
  }
  if (s.median) {
    const double m = *s.median;
    if (!finite(m) || m < s.a || m > s.b) {
      throw Error(ErrorCode::kStatisticOutOfRange,
                  "median " + fmt(m) + " outside [" + fmt(s.a) + ", " +
                      fmt(s.b) + "]");
    }
  }
  if (s.mean) {
    const double mu = *s.mean;
    if (!finite(mu) || mu < s.a || mu > s.b) {
      throw Error(ErrorCode::kStatisticOutOfRange,
                  "mean " + fmt(mu) + " outside [" + fmt(s.a) + ", " +
                      fmt(s.b) + "]");
    }
  }
  if (s.sd) {
    const double sd = *s.sd;
    if (!finite(sd) || sd < 0.0) {
      throw Error(ErrorCode::kStatisticOutOfRange,
                  "standard deviation " + fmt(sd) + " must be non-negative");
    }
    const double vmax = max_variance(s.a, s.b, *s.mean);
    const double scale = (s.b - s.a) * (s.b - s.a);
    if (sd * sd > vmax + kVarianceRelTol * scale) {
      throw Error(ErrorCode::kInfeasibleVariance,
                  "variance " + fmt(sd * sd) + " exceeds " + fmt(vmax));
    }
  }
  if (s.median && s.mean) {
    const double lo = 0.5 * (s.a + *s.median);
    const double hi = 0.5 * (*s.median + s.b);
    if (*s.mean < lo || *s.mean > hi) {
      throw Error(ErrorCode::kInfeasibleMedianMean,
                  "mean " + fmt(*s.mean) + " outside [" + fmt(lo) + ", " +
                      fmt(hi) + "] implied by the median");
    }
  }
  return d;
}

}  // namespace pba
