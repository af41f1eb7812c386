#include "rankdist/ensembles.hpp"
#include "rankdist/qseries.hpp"

#include <gtest/gtest.h>

using namespace rankdist;

namespace {

void expect_probs(const RankPmf& pmf, std::initializer_list<Rational> want) {
  ASSERT_EQ(pmf.probs.size(), static_cast<Eigen::Index>(want.size()));
  Eigen::Index k = 0;
  for (const auto& w : want) EXPECT_EQ(pmf.probs(k++), w) << pmf.ensemble.name() << " k=" << k - 1;
}

std::vector<EnsembleId> every_ensemble() {
  auto es = all_ensembles(0);
  for (long m = 1; m <= 3; ++m) es.push_back(EnsembleId::uniform(m));
  return es;
}

}  // namespace

TEST(FinitePmf, EnumerationExamples) {
  expect_probs(finite_pmf(EnsembleId::uniform(0), 2, 2), {ratio(3, 8), ratio(9, 16), ratio(1, 16)});
  expect_probs(finite_pmf(EnsembleId::of(EnsembleKind::Symmetric), 2, 2), {ratio(1, 2), ratio(3, 8), ratio(1, 8)});
  expect_probs(finite_pmf(EnsembleId::of(EnsembleKind::ZeroDiagEven), 2, 2), {ratio(1, 2), ratio(1, 2)});
  expect_probs(finite_pmf(EnsembleId::of(EnsembleKind::SkewCentroOdd), 3, 1), {Rational(1)});
  expect_probs(finite_pmf(EnsembleId::of(EnsembleKind::Hermitian), 3, 1), {ratio(2, 3), ratio(1, 3)});
}

TEST(FinitePmf, NormalizedNonnegativeOnGrid) {
  for (const auto& e : every_ensemble())
    for (long q = 2; q <= 5; ++q)
      for (long n = 0; n <= 12; ++n) {
        if (!parity_ok(e, n)) continue;
        const RankPmf pmf = finite_pmf(e, q, n);
        EXPECT_EQ(pmf.kmax(), support_max(e, n));
        EXPECT_EQ(pmf.probs.sum(), 1) << e.name() << " q=" << q << " n=" << n;
        for (long k = 0; k <= pmf.kmax(); ++k) EXPECT_GE(pmf.probs(k), 0);
      }
}

TEST(FinitePmf, SupportSizes) {
  EXPECT_EQ(support_max(EnsembleId::uniform(2), 7), 7);
  EXPECT_EQ(support_max(EnsembleId::of(EnsembleKind::Symmetric), 7), 7);
  EXPECT_EQ(support_max(EnsembleId::of(EnsembleKind::ZeroDiagEven), 8), 4);
  EXPECT_EQ(support_max(EnsembleId::of(EnsembleKind::SkewCentroEven), 8), 4);
  EXPECT_EQ(support_max(EnsembleId::of(EnsembleKind::ZeroDiagOdd), 7), 3);
  EXPECT_EQ(support_max(EnsembleId::of(EnsembleKind::SkewCentroOdd), 7), 3);
  EXPECT_EQ(support_max(EnsembleId::of(EnsembleKind::Hermitian), 7), 7);
}

TEST(FinitePmf, ParityAndRangeErrors) {
  EXPECT_THROW(finite_pmf(EnsembleId::of(EnsembleKind::ZeroDiagEven), 2, 3), std::invalid_argument);
  EXPECT_THROW(finite_pmf(EnsembleId::of(EnsembleKind::SkewCentroOdd), 3, 4), std::invalid_argument);
  EXPECT_THROW(finite_pmf(EnsembleId::uniform(0), 2, -1), std::invalid_argument);
  EXPECT_THROW(finite_pmf(EnsembleId::uniform(0), 1, 2), std::invalid_argument);
}

TEST(FinitePmf, RealizabilityFlag) {
  EXPECT_FALSE(finite_pmf(EnsembleId::of(EnsembleKind::Hermitian), 2, 3).realizable());
  EXPECT_TRUE(finite_pmf(EnsembleId::of(EnsembleKind::Hermitian), 3, 3).realizable());
  EXPECT_FALSE(field_realizable(EnsembleId::of(EnsembleKind::SkewCentroOdd), 4));
  EXPECT_FALSE(field_realizable(EnsembleId::uniform(0), 6));
  EXPECT_TRUE(field_realizable(EnsembleId::of(EnsembleKind::ZeroDiagEven), 8));
}

TEST(FinitePmf, NotMonotoneInK) {
  // 3/8 < 9/16 > 1/16: nothing may assume monotone probabilities
  const RankPmf p = finite_pmf(EnsembleId::uniform(0), 2, 2);
  EXPECT_LT(p.probs(0), p.probs(1));
  EXPECT_GT(p.probs(1), p.probs(2));
}

TEST(ResolveEnsemble, FamiliesAndParity) {
  EXPECT_EQ(resolve_ensemble("zerodiag", 0, 4).kind, EnsembleKind::ZeroDiagEven);
  EXPECT_EQ(resolve_ensemble("zerodiag", 0, 5).kind, EnsembleKind::ZeroDiagOdd);
  EXPECT_EQ(resolve_ensemble("skewcentro", 0, 3).kind, EnsembleKind::SkewCentroOdd);
  EXPECT_EQ(resolve_ensemble("uniform", 2, 3), EnsembleId::uniform(2));
  EXPECT_THROW(resolve_ensemble("orthogonal", 0, 3), std::invalid_argument);
}

TEST(LimitPmf, UniformP0IsEulerProduct) {
  const LimitPmf L = limit_pmf(EnsembleId::uniform(0), 2, 12, default_qprod_trunc(2));
  EXPECT_TRUE(L.prob(0).contains(infinite_qproduct({2, 1, 1, -1, 300})));
  EXPECT_TRUE(L.prob(0).intersects(IntervalRat(ratio(2887880950, 10000000000), ratio(2887880951, 10000000000))));
}

TEST(LimitPmf, SymmetricP0LowerBound) {
  const LimitPmf L = limit_pmf(EnsembleId::of(EnsembleKind::Symmetric), 2, 12, default_qprod_trunc(2));
  EXPECT_GE(L.prob(0).lo(), ratio(3, 8));
}

TEST(LimitPmf, NormalizationAndPositivity) {
  for (const auto& e : every_ensemble())
    for (long q = 2; q <= 5; ++q) {
      const LimitPmf L = limit_pmf(e, q, 8, default_qprod_trunc(q));
      EXPECT_TRUE(L.total().contains(1)) << e.name() << " q=" << q;
      for (long k = 0; k <= L.trunc_k; ++k) EXPECT_GT(L.prob(k).lo(), 0);
      EXPECT_GT(L.tail.lo(), 0);
    }
}

TEST(LimitPmf, RejectsShortTruncation) {
  EXPECT_THROW(limit_pmf(EnsembleId::uniform(0), 2, 3, 65), std::invalid_argument);
}

TEST(LimitPmf, FinitePmfConvergesIntoLimit) {
  // distance from p_{k,n} to the limit enclosure shrinks along n = 6, 12, 20
  auto gap = [](const Rational& x, const IntervalRat& I) {
    return x < I.lo() ? I.lo() - x : (x > I.hi() ? x - I.hi() : Rational(0));
  };
  for (const auto& e : every_ensemble())
    for (long q : {2, 3}) {
      const LimitPmf L = limit_pmf(e, q, 8, 2 * default_qprod_trunc(q));
      for (long k = 0; k <= 2; ++k) {
        EXPECT_LT(L.prob(k).width(), qpow(2, -40));
        Rational prev = 1;
        for (long n : {6, 12, 20}) {
          const long nn = parity_ok(e, n) ? n : n + 1;
          const Rational g = gap(finite_pmf(e, q, nn).prob(k), L.prob(k));
          EXPECT_LT(g, prev) << e.name() << " q=" << q << " k=" << k << " n=" << nn;
          prev = g;
        }
        EXPECT_LT(prev, qpow(2, -10)) << e.name() << " q=" << q << " k=" << k;
      }
    }
}

TEST(RankCountQBinomial, KnownValues) {
  EXPECT_EQ(rank_count_qbinomial(2, 2, 2, 2), ratio(6, 16));
  EXPECT_EQ(rank_count_qbinomial(1, 1, 0, 3), ratio(1, 3));
  EXPECT_EQ(rank_count_qbinomial(3, 4, 2, 2), finite_pmf(EnsembleId::uniform(1), 2, 3).probs(1));
}

TEST(RankCountQBinomial, MatchesProductFormula) {
  for (long q = 2; q <= 4; ++q)
    for (long n = 0; n <= 8; ++n)
      for (long m = 0; m <= 3; ++m) {
        const RankPmf pmf = finite_pmf(EnsembleId::uniform(m), q, n);
        for (long k = 0; k <= n; ++k) EXPECT_EQ(rank_count_qbinomial(n, n + m, n - k, q), pmf.probs(k));
      }
}

TEST(SkewCentroReduction, Examples) {
  const auto w4 = skewcentro_even_reduction(2, 4);
  EXPECT_TRUE(w4.equal);
  EXPECT_EQ(w4.skew_centro.size(), 3u);
  EXPECT_TRUE(skewcentro_even_reduction(3, 2).equal);
  const auto w0 = skewcentro_even_reduction(2, 0);
  EXPECT_TRUE(w0.equal);
  ASSERT_EQ(w0.skew_centro.size(), 1u);
  EXPECT_EQ(w0.skew_centro[0], 1);
}

TEST(Json, RationalsAsStrings) {
  const auto j = to_json(finite_pmf(EnsembleId::uniform(0), 2, 2));
  EXPECT_EQ(j["probs"][0], "3/8");
  EXPECT_EQ(j["ensemble"]["family"], "uniform");
  EXPECT_EQ(j["field_realizable"], true);
}
