#include <gtest/gtest.h>

#include "oracle.hpp"

TEST(OracleAuc, Definition) {
  EXPECT_EQ(oracle::auc({1}, {0}), 1.0);
  EXPECT_EQ(oracle::auc({0}, {1}), 0.0);
  EXPECT_EQ(oracle::auc({1, 0}, {1, 0}), 0.5);
  EXPECT_THROW(oracle::auc({}, {1}), std::invalid_argument);
}

TEST(OracleRank, Conventions) {
  EXPECT_EQ(oracle::rank(0.5, {0.5, 0.5, 0.9}, dlpeval::RankConvention::Optimistic), 2.0);
  EXPECT_EQ(oracle::rank(0.5, {0.5, 0.5, 0.9}, dlpeval::RankConvention::Pessimistic), 4.0);
  EXPECT_EQ(oracle::rank(0.5, {0.5, 0.5, 0.9}, dlpeval::RankConvention::Mean), 3.0);
}
