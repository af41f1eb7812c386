#include "rankdist/ensembles.hpp"
#include "rankdist/markov.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace rankdist;

TEST(RankChain, SmallestChainExact) {
  // M(0,1) = q^0 (q - 1) / ((q - 1)(q - 1)) = 1 and M(1,0) = (q - 1)(q - 1) / ((q - 1)(q - 1)) = 1 at q = 2
  const RankChain c = build_chain(2, 1, 0);
  EXPECT_EQ(c(0, 1), 1);
  EXPECT_EQ(c(1, 0), 1);
  EXPECT_EQ(c(0, 0), 0);
  EXPECT_EQ(c(1, 1), 0);
  for (const auto& chk : verify_stationarity(c)) EXPECT_TRUE(chk.pass) << chk.name;
}

TEST(RankChain, FormulaEntries) {
  const long q = 3, n = 3, m = 1;
  const RankChain c = build_chain(q, n, m);
  const Rational den = Rational((ipow(q, n) - 1) * (ipow(q, n + m) - 1));
  for (long i = 0; i <= n; ++i) {
    const Rational up = i < n ? Rational(ipow(q, n - i - 1) * (ipow(q, n - i) - 1)) / den : Rational(0);
    const Rational down = Rational((ipow(q, n) - ipow(q, n - i)) * (ipow(q, n + m) - ipow(q, n - i))) / den;
    if (i < n) { EXPECT_EQ(c(i, i + 1), up); }
    if (i > 0) { EXPECT_EQ(c(i, i - 1), down); }
    EXPECT_EQ(c(i, i), 1 - up - down);
  }
  EXPECT_EQ(c(0, 2), 0);
}

TEST(RankChain, RowsSumToOneOnGrid) {
  for (long q = 2; q <= 5; ++q)
    for (long n = 1; n <= 12; ++n)
      for (long m = 0; m <= 3; ++m) {
        const RankChain c = build_chain(q, n, m);
        for (long i = 0; i <= n; ++i) {
          Rational s = 0;
          for (long j = 0; j <= n; ++j) {
            EXPECT_GE(c(i, j), 0);
            EXPECT_LE(c(i, j), 1);
            s += c(i, j);
          }
          EXPECT_EQ(s, 1) << "q=" << q << " n=" << n << " m=" << m << " i=" << i;
        }
      }
}

TEST(RankChain, StationarityDefectZero) {
  EXPECT_TRUE(stationarity_defect(build_chain(2, 3, 0)).isZero());
  EXPECT_TRUE(stationarity_defect(build_chain(3, 5, 2)).isZero());
  for (long q = 2; q <= 5; ++q)
    for (long n = 1; n <= 12; ++n)
      for (long m = 0; m <= 3; ++m) {
        const RankChain c = build_chain(q, n, m);
        for (const auto& chk : verify_stationarity(c))
          EXPECT_TRUE(chk.pass) << chk.name << " q=" << q << " n=" << n << " m=" << m;
      }
}

TEST(RankChain, DetailedBalanceIndependently) {
  for (long q : {2, 3})
    for (long n = 1; n <= 8; ++n) {
      const RankChain c = build_chain(q, n, 1);
      const RankPmf pi = finite_pmf(EnsembleId::uniform(1), q, n);
      for (long i = 0; i < n; ++i) EXPECT_EQ(pi.probs(i) * c(i, i + 1), pi.probs(i + 1) * c(i + 1, i));
    }
}

TEST(RankChain, ConvergesMonotonically) {
  const RankChain c = build_chain(2, 4, 0);
  const auto tv = tv_to_stationarity(c, 0, 50);
  ASSERT_EQ(tv.size(), 51u);
  for (std::size_t t = 1; t < tv.size(); ++t) EXPECT_LT(tv[t], tv[t - 1]) << "t=" << t;
  EXPECT_LT(tv.back(), Rational(1, 1000));
  EXPECT_THROW(tv_to_stationarity(c, 5, 3), std::out_of_range);
}

TEST(RankChain, RejectsBadParameters) {
  EXPECT_THROW(build_chain(1, 3, 0), std::invalid_argument);
  EXPECT_THROW(build_chain(2, 0, 0), std::invalid_argument);
  EXPECT_THROW(build_chain(2, 3, -1), std::invalid_argument);
}

TEST(Simulation, ChainAndMatrixMatchStationaryLaw) {
  for (auto [q, n, m] : {std::tuple{2L, 4L, 0L}, std::tuple{3L, 3L, 1L}}) {
    const ChainSimulation s = simulate_chain_vs_matrix(q, n, m, 100000, 1);
    EXPECT_LT(s.tv_chain, 0.05) << "q=" << q;
    EXPECT_LT(s.tv_matrix, 0.05) << "q=" << q;
    EXPECT_EQ(s.burn_in, 10 * n);
    EXPECT_EQ(std::accumulate(s.occupation_chain.begin(), s.occupation_chain.end(), 0L), 100000);
    EXPECT_EQ(std::accumulate(s.occupation_matrix.begin(), s.occupation_matrix.end(), 0L), 100000);
    EXPECT_EQ(s.stationarity_defect, 0);
  }
}

TEST(Simulation, Deterministic) {
  const auto a = simulate_chain_vs_matrix(2, 3, 0, 5000, 4);
  const auto b = simulate_chain_vs_matrix(2, 3, 0, 5000, 4);
  EXPECT_EQ(a.occupation_chain, b.occupation_chain);
  EXPECT_EQ(a.occupation_matrix, b.occupation_matrix);
}

TEST(Simulation, Errors) {
  EXPECT_THROW(simulate_chain_vs_matrix(2, 3, 0, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(simulate_chain_vs_matrix(6, 3, 0, 10, 1), std::invalid_argument);
}

TEST(Json, ChainFields) {
  const auto j = to_json(build_chain(2, 1, 0));
  EXPECT_EQ(j["q"], 2);
  EXPECT_EQ(j["n"], 1);
  const auto s = to_json(simulate_chain_vs_matrix(2, 2, 0, 100, 1));
  EXPECT_EQ(s["stationarity_defect"], "0/1");
}
