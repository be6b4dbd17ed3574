#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "pba/interval.hpp"

namespace pba {

struct MinMax {
  double a;
  double b;
};

struct MinMaxMedian {
  double a;
  double b;
  double median;
};

struct MinMaxMean {
  double a;
  double b;
  double mean;
};

struct MinMaxMeanStd {
  double a;
  double b;
  double mean;
  double sd;
};

struct MinMaxMedianMean {
  double a;
  double b;
  double median;
  double mean;
};

// The summary statistics known about a parameter. The alternative selects the
// p-box constructor.
using MinimalData = std::variant<MinMax, MinMaxMedian, MinMaxMean,
                                 MinMaxMeanStd, MinMaxMedianMean>;

enum class DataKind { kMinMax, kMedian, kMean, kMeanStd, kMedianMean };

DataKind kind_of(const MinimalData& d);
std::string_view to_string(DataKind kind);

// Flat view of whichever statistics are present.
struct Statistics {
  double a = 0.0;
  double b = 0.0;
  std::optional<double> median;
  std::optional<double> mean;
  std::optional<double> sd;
};

Statistics statistics(const MinimalData& d);
Interval support(const MinimalData& d);

// Relative tolerance applied to sd^2 <= (b-mu)(mu-a) so that boundary data
// entered through a rounded square root is still accepted.
inline constexpr double kVarianceRelTol = 1e-12;

// Largest variance compatible with support and mean.
double max_variance(double a, double b, double mean);

// Returns d when every invariant holds; throws pba::Error otherwise.
MinimalData validate_minimal_data(const MinimalData& d);

}  // namespace pba
