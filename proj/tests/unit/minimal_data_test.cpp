#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "pba/minimal_data.hpp"

namespace pba {
namespace {

TEST(ValidateMinimalData, AcceptsPlainSupport) {
  EXPECT_NO_THROW(validate_minimal_data(MinMax{0, 1}));
}

TEST(ValidateMinimalData, RejectsReversedOrEqualBounds) {
  EXPECT_PBA_ERROR(validate_minimal_data(MinMax{2, 1}), ErrorCode::kReversedBounds);
  EXPECT_PBA_ERROR(validate_minimal_data(MinMax{1, 1}), ErrorCode::kReversedBounds);
}

TEST(ValidateMinimalData, RejectsStatisticsOutsideSupport) {
  EXPECT_PBA_ERROR(validate_minimal_data(MinMaxMedian{0, 1, 1.5}),
                   ErrorCode::kStatisticOutOfRange);
  EXPECT_PBA_ERROR(validate_minimal_data(MinMaxMean{0, 1, -0.1}),
                   ErrorCode::kStatisticOutOfRange);
  EXPECT_PBA_ERROR(validate_minimal_data(MinMaxMeanStd{0, 1, 0.5, -0.1}),
                   ErrorCode::kStatisticOutOfRange);
}

TEST(ValidateMinimalData, RejectsExcessVariance) {
  EXPECT_PBA_ERROR(validate_minimal_data(MinMaxMeanStd{0, 1, 0.5, 0.6}),
                   ErrorCode::kInfeasibleVariance);
}

TEST(ValidateMinimalData, AcceptsBoundaryVariance) {
  EXPECT_NO_THROW(validate_minimal_data(MinMaxMeanStd{0, 1, 0.5, 0.5}));
  EXPECT_NO_THROW(validate_minimal_data(MinMaxMeanStd{0, 1, 0.5, 0.0}));
}

TEST(ValidateMinimalData, MedianMeanRange) {
  EXPECT_NO_THROW(validate_minimal_data(MinMaxMedianMean{0, 1, 0.4, 0.2}));
  EXPECT_NO_THROW(validate_minimal_data(MinMaxMedianMean{0, 1, 0.4, 0.69}));
  EXPECT_PBA_ERROR(validate_minimal_data(MinMaxMedianMean{0, 1, 0.4, 0.19}),
                   ErrorCode::kInfeasibleMedianMean);
  EXPECT_PBA_ERROR(validate_minimal_data(MinMaxMedianMean{0, 1, 0.4, 0.71}),
                   ErrorCode::kInfeasibleMedianMean);
}

TEST(ValidateMinimalData, ReturnsInputUnchanged) {
  const MinimalData d = MinMaxMeanStd{1, 3, 2, 0.5};
  const MinimalData v = validate_minimal_data(d);
  const auto& s = std::get<MinMaxMeanStd>(v);
  EXPECT_EQ(s.a, 1);
  EXPECT_EQ(s.b, 3);
  EXPECT_EQ(s.mean, 2);
  EXPECT_EQ(s.sd, 0.5);
}

TEST(MinimalData, StatisticsView) {
  const Statistics s = statistics(MinMaxMedianMean{0, 4, 1, 1.5});
  EXPECT_EQ(s.a, 0);
  EXPECT_EQ(s.b, 4);
  EXPECT_EQ(*s.median, 1);
  EXPECT_EQ(*s.mean, 1.5);
  EXPECT_FALSE(s.sd.has_value());
  EXPECT_EQ(kind_of(MinMaxMean{0, 1, 0.5}), DataKind::kMean);
  EXPECT_EQ(max_variance(0, 1, 0.5), 0.25);
}

}  // namespace
}  // namespace pba
