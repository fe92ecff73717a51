#include <temof/stats.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace temof;
using namespace temof::stats;

TEST(Midranks, TiesShareAverage) {
  std::vector<double> const v{3, 1, 3, 2};
  EXPECT_EQ(midranks(v), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(RankSum, SmallSeparatedSamplesAreNotSignificant) {
  std::vector<double> const a{1, 2, 3};
  std::vector<double> const b{4, 5, 6};
  auto const r = ranksum_mark(a, b, 0.05, orientation::lower_is_better);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_value, 0.1, 1e-12);
  EXPECT_EQ(r.result, mark::equal);
}

TEST(RankSum, LargeShiftIsSignificantBothWays) {
  std::vector<double> a(30);
  std::vector<double> b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = i;
    b[i] = 100 + i;
  }
  auto const r = ranksum_mark(a, b, 0.05, orientation::lower_is_better);
  EXPECT_FALSE(r.exact);
  EXPECT_LT(r.p_value, 1e-3);
  EXPECT_EQ(r.result, mark::better);
  EXPECT_EQ(ranksum_mark(b, a, 0.05, orientation::lower_is_better).result, mark::worse);
  EXPECT_EQ(ranksum_mark(a, b, 0.05, orientation::higher_is_better).result, mark::worse);
  EXPECT_EQ(ranksum_mark(b, a, 0.05, orientation::higher_is_better).result, mark::better);
}

TEST(RankSum, IdenticalSamples) {
  std::vector<double> const a{2, 2, 2};
  auto const r = ranksum_mark(a, a, 0.05, orientation::lower_is_better);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.result, mark::equal);
  EXPECT_THROW(ranksum_mark(std::vector<double>{1}, a, 0.05, orientation::lower_is_better), usage_error);
}

TEST(RankSum, ExactMatchesEnumeration) {
  std::mt19937_64 gen(21);
  for (std::size_t total = 4; total <= 12; ++total) {
    for (std::size_t m = 2; m + 2 <= total; ++m) {
      for (int t = 0; t < 5; ++t) {
        auto const pts = oracle::random_points(gen, total, 1);
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < total; ++i) {
          (i < m ? a : b).push_back(pts[i][0]);
        }
        auto const r = ranksum_mark(a, b, 0.05, orientation::lower_is_better);
        ASSERT_TRUE(r.exact);
        EXPECT_NEAR(r.p_value, oracle::ranksum_p(a, b), 1e-12);
      }
    }
  }
}

TEST(RankSum, ApproximationNearExactAtSwitchover) {
  // just past the exact range the normal approximation tracks the enumeration
  std::mt19937_64 gen(22);
  for (int t = 0; t < 10; ++t) {
    auto const pts = oracle::random_points(gen, 21, 1);
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < 21; ++i) {
      (i < 10 ? a : b).push_back(pts[i][0] + (i < 10 ? 0.0 : 0.3));
    }
    auto const r = ranksum_mark(a, b, 0.05, orientation::lower_is_better);
    EXPECT_FALSE(r.exact);
    EXPECT_NEAR(r.p_value, oracle::ranksum_p(a, b), 0.02);
  }
}

TEST(SignedRank, AllOneSided) {
  std::vector<double> a(10);
  std::vector<double> b(10);
  for (int i = 0; i < 10; ++i) {
    a[i] = 2.0 * (i + 1);
    b[i] = i + 1;
  }
  auto const r = signed_rank(a, b);
  EXPECT_EQ(r.r_plus, 55.0);
  EXPECT_EQ(r.r_minus, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_value, 2.0 / 1024.0, 1e-15);
}

TEST(SignedRank, EqualSamples) {
  std::vector<double> const a{1, 2, 3, 4};
  auto const r = signed_rank(a, a);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.n_effective, 0U);
}

TEST(SignedRank, MatchesEnumerationWithTies) {
  std::mt19937_64 gen(23);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (int t = 0; t < 20; ++t) {
      auto const a = oracle::random_grid_points(gen, n, 1, 5);
      auto const b = oracle::random_grid_points(gen, n, 1, 5);
      std::vector<double> av;
      std::vector<double> bv;
      std::vector<double> mags;
      std::vector<double> signs;
      for (std::size_t i = 0; i < n; ++i) {
        av.push_back(a[i][0]);
        bv.push_back(b[i][0]);
        double const d = a[i][0] - b[i][0];
        if (d != 0.0) {
          mags.push_back(std::abs(d));
          signs.push_back(d);
        }
      }
      auto const r = signed_rank(av, bv);
      auto const total = static_cast<double>(mags.size() * (mags.size() + 1)) / 2.0;
      EXPECT_NEAR(r.r_plus + r.r_minus, total, 1e-12);
      if (mags.empty()) {
        continue;
      }
      // midranks by counting, independent of the library ranking
      std::vector<double> ranks(mags.size());
      for (std::size_t i = 0; i < mags.size(); ++i) {
        double below = 0;
        double same = 0;
        for (double m : mags) {
          below += m < mags[i] ? 1 : 0;
          same += m == mags[i] ? 1 : 0;
        }
        ranks[i] = below + (same + 1.0) / 2.0;
      }
      double rp = 0;
      for (std::size_t i = 0; i < mags.size(); ++i) {
        rp += signs[i] > 0 ? ranks[i] : 0.0;
      }
      EXPECT_NEAR(r.r_plus, rp, 1e-12);
      EXPECT_NEAR(r.p_value, oracle::signed_rank_p(ranks, rp), 1e-12);
    }
  }
}

TEST(Friedman, RanksAndStatistic) {
  std::vector<std::vector<double>> const m{{1, 2, 3}, {1, 3, 2}, {1, 2, 3}};
  auto const r = friedman_ranks(m, orientation::lower_is_better);
  EXPECT_EQ(r.mean_ranks[0], 1.0);
  EXPECT_NEAR(std::accumulate(r.mean_ranks.begin(), r.mean_ranks.end(), 0.0) / 3.0, 2.0, 1e-12);
  auto const h = friedman_ranks(m, orientation::higher_is_better);
  EXPECT_EQ(h.mean_ranks[0], 3.0);

  std::vector<std::vector<double>> const tied{{1, 1, 2}, {1, 1, 2}};
  auto const t = friedman_ranks(tied, orientation::lower_is_better);
  EXPECT_EQ(t.mean_ranks[0], 1.5);
  EXPECT_EQ(t.mean_ranks[1], 1.5);
  EXPECT_GT(r.chi_square, 0.0);
  EXPECT_THROW(friedman_ranks({{1, 2}}, orientation::lower_is_better), usage_error);
}
