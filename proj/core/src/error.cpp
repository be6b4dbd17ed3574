#include "pba/error.hpp"

#include <utility>

namespace pba {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kReversedBounds: return "ReversedBounds";
    case ErrorCode::kStatisticOutOfRange: return "StatisticOutOfRange";
    case ErrorCode::kInfeasibleVariance: return "InfeasibleVariance";
    case ErrorCode::kInfeasibleMedianMean: return "InfeasibleMedianMean";
    case ErrorCode::kProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::kMismatchedSupports: return "MismatchedSupports";
    case ErrorCode::kEmptyBox: return "EmptyBox";
    case ErrorCode::kZeroSlices: return "ZeroSlices";
    case ErrorCode::kTooManyHyperrectangles: return "TooManyHyperrectangles";
    case ErrorCode::kInvalidDistributionSpec: return "InvalidDistributionSpec";
    case ErrorCode::kInfeasibleMoments: return "InfeasibleMoments";
    case ErrorCode::kInvalidParameterSet: return "InvalidParameterSet";
    case ErrorCode::kModelEvaluationError: return "ModelEvaluationError";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kInvalidSearchBox: return "InvalidSearchBox";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kRowSumViolation: return "RowSumViolation";
    case ErrorCode::kInvalidModelSpec: return "InvalidModelSpec";
    case ErrorCode::kNonMonotoneUtility: return "NonMonotoneUtility";
    case ErrorCode::kTooFewActions: return "TooFewActions";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigParseError: return "ConfigParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::vector<double> point)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      point_(std::move(point)) {}

}  // namespace pba
