#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pba {

enum class ErrorCode {
  kReversedBounds,
  kStatisticOutOfRange,
  kInfeasibleVariance,
  kInfeasibleMedianMean,
  kProbabilityOutOfRange,
  kMismatchedSupports,
  kEmptyBox,
  kZeroSlices,
  kTooManyHyperrectangles,
  kInvalidDistributionSpec,
  kInfeasibleMoments,
  kInvalidParameterSet,
  kModelEvaluationError,
  kNonFiniteObjective,
  kInvalidSearchBox,
  kDimensionTooLarge,
  kSingularSystem,
  kRowSumViolation,
  kInvalidModelSpec,
  kNonMonotoneUtility,
  kTooFewActions,
  kInvalidArgument,
  kConfigParseError,
  kIoError,
};

// Stable identifier used in machine-readable error records.
std::string_view to_string(ErrorCode code);

// Every failure raised by the library. Errors tied to a point in parameter
// space (model failures, non-finite objectives) carry that point.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<double> point = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  ErrorCode code_;
  std::vector<double> point_;
};

}  // namespace pba
