#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "tauleap/error.hpp"
#include "tauleap/history.hpp"
#include "test_networks.hpp"

using namespace tauleap;

TEST(ChannelHistory, StartsAtOrigin) {
  ChannelHistory h(3);
  EXPECT_EQ(h.channels(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(h.lambda(j), 0.0);
    EXPECT_EQ(h.count(j), 0);
    EXPECT_TRUE(h.at_frontier(j));
    EXPECT_FALSE(h.next_stored(j).has_value());
  }
  EXPECT_TRUE(h.consistent());
}

TEST(ChannelHistory, ExtendAppendsAndAdvanceMoves) {
  ChannelHistory h(1);
  RngStream r(1, 0);
  const auto y = h.extend(0, 2.5, r);
  EXPECT_EQ(h.nodes(0).size(), 2u);
  EXPECT_EQ(h.nodes(0)[1].count, y);
  EXPECT_THROW(h.extend(0, 1.0, r), NumericalError);
  h.advance(0, 2.5);
  EXPECT_EQ(h.count(0), y);
  EXPECT_TRUE(h.at_frontier(0));
}

TEST(ChannelHistory, SampleAtSnapsToExistingNodes) {
  ChannelHistory h(1);
  RngStream r(2, 0);
  h.extend(0, 1.0, r);
  const auto before = h.nodes(0).size();
  EXPECT_EQ(h.sample_at(0, 1.0 + 1e-14, r), h.nodes(0)[1].count);
  EXPECT_EQ(h.nodes(0).size(), before);
  EXPECT_EQ(h.sample_at(0, 0.0, r), 0);
}

TEST(ChannelHistory, BridgeStaysBetweenNeighbours) {
  RngStream r(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    ChannelHistory h(1);
    h.extend(0, 10.0, r);
    const auto top = h.nodes(0)[1].count;
    const auto mid = h.sample_at(0, 4.0, r);
    const auto inner = h.sample_at(0, 7.0, r);
    EXPECT_LE(0, mid);
    EXPECT_LE(mid, inner);
    EXPECT_LE(inner, top);
    EXPECT_TRUE(h.consistent());
  }
}

TEST(ChannelHistory, QueryLeftOfCursorThrows) {
  ChannelHistory h(1);
  RngStream r(4, 0);
  h.extend(0, 1.0, r);
  h.advance(0, 1.0);
  EXPECT_THROW(h.sample_at(0, 0.5, r), NumericalError);
  EXPECT_THROW(h.advance(0, 3.0), NumericalError);
}

TEST(ChannelHistory, PastFrontierExtends) {
  ChannelHistory h(1);
  RngStream r(5, 0);
  h.extend(0, 1.0, r);
  const auto y1 = h.nodes(0)[1].count;
  const auto y3 = h.sample_at(0, 3.0, r);
  EXPECT_GE(y3, y1);
  EXPECT_EQ(h.nodes(0).size(), 3u);
}

TEST(ChannelHistory, RewoundKeepsNodes) {
  ChannelHistory h(2);
  RngStream r(6, 0);
  h.extend(0, 1.0, r);
  h.advance(0, 1.0);
  const auto copy = h.rewound();
  EXPECT_EQ(copy.cursor(0), 0u);
  EXPECT_EQ(copy.nodes(0).size(), h.nodes(0).size());
  EXPECT_EQ(h.cursor(0), 1u);
}

TEST(ChannelHistory, BridgeLawMatchesBinomial) {
  // Y(lambda) given Y(0)=0 and Y(L)=n must be Binomial(n, lambda/L).
  RngStream r(7, 0);
  const double L = 12.0, lambda = 3.0;
  const std::int64_t n = 12;
  std::vector<double> counts(n + 1, 0.0);
  int kept = 0;
  while (kept < 20000) {
    ChannelHistory h(1);
    h.extend(0, L, r);
    if (h.nodes(0)[1].count != n) continue;
    counts[static_cast<std::size_t>(h.sample_at(0, lambda, r))] += 1.0;
    ++kept;
  }
  boost::math::binomial_distribution<double> law(static_cast<double>(n), lambda / L);
  double chi = 0.0;
  int dof = -1;
  double tail_obs = 0.0, tail_exp = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    const double e = kept * boost::math::pdf(law, static_cast<double>(k));
    if (e < 5.0) {
      tail_obs += counts[k];
      tail_exp += e;
      continue;
    }
    chi += (counts[k] - e) * (counts[k] - e) / e;
    ++dof;
  }
  if (tail_exp > 0.0) {
    chi += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
    ++dof;
  }
  EXPECT_GT(tauleap::testing::chi_square_p(chi, dof), 1e-3);
}
