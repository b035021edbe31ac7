#include <gtest/gtest.h>

#include <vector>

#include "wbary/branching.hpp"

using namespace wbary;

TEST(SelectBranchVariable, MostRepeatedSingleBucket) {
  const std::vector<double> z{0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(select_branch_variable(z, BranchingStrategy::most_repeated), 0u);
}

TEST(SelectBranchVariable, ClosestToIntegerTieGoesToSmallestIndex) {
  const std::vector<double> z{0.98, 0.02, 0.5, 0.5};
  EXPECT_EQ(select_branch_variable(z, BranchingStrategy::closest_to_integer, 1e-6), 0u);
}

TEST(SelectBranchVariable, IndexOrderSkipsIntegralEntries) {
  const std::vector<double> z{1.0, 0.0, 0.3, 0.7};
  EXPECT_EQ(select_branch_variable(z, BranchingStrategy::index_order, 1e-6), 2u);
}

TEST(SelectBranchVariable, MostRepeatedPicksLargestBucket) {
  const std::vector<double> z{0.3, 0.7, 0.25, 0.25, 0.25 + 1e-9, 0.7};
  EXPECT_EQ(select_branch_variable(z, BranchingStrategy::most_repeated), 2u);
}

TEST(SelectBranchVariable, MostRepeatedTieUsesSmallestIndex) {
  const std::vector<double> z{0.0, 0.6, 0.4, 0.6, 0.4};
  EXPECT_EQ(select_branch_variable(z, BranchingStrategy::most_repeated), 1u);
}

TEST(SelectBranchVariable, ClosestToIntegerPrefersNearIntegral) {
  const std::vector<double> z{0.5, 0.9, 0.05, 0.5};
  EXPECT_EQ(select_branch_variable(z, BranchingStrategy::closest_to_integer), 2u);
}

TEST(SelectBranchVariable, ToleranceExcludesNearIntegralValues) {
  const std::vector<double> z{1e-7, 1.0 - 1e-7, 0.4};
  for (auto s : kAllStrategies) EXPECT_EQ(select_branch_variable(z, s, 1e-6), 2u);
}

TEST(SelectBranchVariable, ThrowsWithoutFractionalEntry) {
  const std::vector<double> z{1.0, 0.0, 0.0, 1.0};
  for (auto s : kAllStrategies) EXPECT_THROW(select_branch_variable(z, s), PricingError);
}

TEST(FractionalityStats, AllHalf) {
  const auto s = fractionality_stats(std::vector<double>{0.5, 0.5, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(s.pct_fractional, 100.0);
  EXPECT_EQ(s.unique_count, 1u);
}

TEST(FractionalityStats, Mixed) {
  const auto s = fractionality_stats(std::vector<double>{1.0, 0.0, 0.3, 0.7});
  EXPECT_DOUBLE_EQ(s.pct_fractional, 50.0);
  EXPECT_EQ(s.unique_count, 2u);
}

TEST(FractionalityStats, Integral) {
  const auto s = fractionality_stats(std::vector<double>{1, 0, 0, 1});
  EXPECT_DOUBLE_EQ(s.pct_fractional, 0.0);
  EXPECT_EQ(s.unique_count, 0u);
}

TEST(Strategy, NamesRoundTrip) {
  for (auto s : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_FALSE(parse_strategy("depth_first").has_value());
}
