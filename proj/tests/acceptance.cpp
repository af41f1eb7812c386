// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "rankdist/ensembles.hpp"
#include "rankdist/gfmatrix.hpp"
#include "rankdist/markov.hpp"
#include "rankdist/qseries.hpp"
#include "rankdist/stein.hpp"
#include "rankdist/tvbounds.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace rankdist;

namespace {

constexpr double kMarkovTv = 0.05;
constexpr long kMarkovSteps = 100000;
constexpr std::uint64_t kMarkovSeed = 1;
constexpr double kEmpiricalTv = 0.02;
constexpr long kEmpiricalTrials = 100000;
constexpr std::uint64_t kEmpiricalSeed = 7;
constexpr long kSteinKMax = 40;
constexpr long kProductNMax = 30;

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

std::vector<long> range(long lo, long hi) {
  std::vector<long> v;
  for (long x = lo; x <= hi; ++x) v.push_back(x);
  return v;
}

std::string cell(const EnsembleId& e, long q, long n) {
  std::ostringstream os;
  os << e.name() << " q=" << q << " n=" << n;
  return os.str();
}

void tv_cells(Outcome& o, const std::vector<GridCell>& cells) {
  double lo = 1e300, hi = 1e300;
  const auto rs = tv_grid(cells, TruncConfig{}, 4);
  for (const auto& r : rs) {
    o.require(r.pass, cell(r.ensemble, r.q, r.n) + " " + variant_name(r.variant) + " " + r.error);
    if (r.pass) {
      lo = std::min(lo, r.lower_margin());
      hi = std::min(hi, r.upper_margin());
    }
  }
  o.note << rs.size() << " cells, min margins lower " << lo << " upper " << hi;
}

void criterion1(Outcome& o) {
  tv_cells(o, theorem_grid({EnsembleId::uniform(0), EnsembleId::uniform(1), EnsembleId::uniform(2)}, range(2, 5), 1,
                           10));
}

void criterion2(Outcome& o) {
  std::vector<EnsembleId> es;
  for (const auto& e : all_ensembles(0))
    if (e.kind != EnsembleKind::UniformRect) es.push_back(e);
  tv_cells(o, theorem_grid(es, range(2, 5), 1, 10));
  for (long q : range(2, 5))
    for (long n = 2; n <= 10; n += 2)
      o.require(verify_skewcentro_even_via_reduction(q, n).pass, "reduction " + cell(EnsembleId::uniform(0), q, n / 2));
}

void criterion3(Outcome& o) {
  std::size_t checks = 0;
  std::vector<EnsembleId> es = all_ensembles(0);
  for (long m = 1; m <= 3; ++m) es.push_back(EnsembleId::uniform(m));
  for (const auto& e : es)
    for (long q : range(2, 5))
      for (long n : range(1, 12)) {
        if (!parity_ok(e, n)) continue;
        for (const auto& c : moment_identities(e, q, n)) {
          ++checks;
          o.require(c.pass, c.name + " " + cell(e, q, n));
        }
      }
  o.note << checks << " identities";
}

void criterion4(Outcome& o) {
  std::size_t checks = 0;
  std::vector<EnsembleId> es = all_ensembles(0);
  for (long m = 1; m <= 2; ++m) es.push_back(EnsembleId::uniform(m));
  for (const auto& e : es)
    for (long q : range(2, 5)) {
      for (long n : range(0, 12))
        if (parity_ok(e, n)) {
          ++checks;
          o.require(registration_holds(stein_pair(e, q, n, false), finite_pmf(e, q, n).probs),
                    "finite registration " + cell(e, q, n));
        }
      ++checks;
      o.require(registration_holds(stein_pair(e, q, std::nullopt, false),
                                   limit_pmf(e, q, kSteinKMax, default_qprod_trunc(q))),
                "limit registration " + e.name());
    }
  for (const auto& e : es)
    for (const auto& c : verify_solution_bounds(e, range(2, 5), kSteinKMax)) {
      ++checks;
      o.require(c.pass, c.name);
    }
  o.note << checks << " checks, k <= " << kSteinKMax << " plus tail";
}

void criterion5(Outcome& o) {
  auto counts_are = [](const EnumerationResult& r, std::vector<Integer> want, long total) {
    return r.counts == want && r.total == total;
  };
  o.require(counts_are(enumerate_ensemble(EnsembleId::uniform(0), 2, 2), {6, 9, 1}, 16), "uniform 2x2 GF(2)");
  o.require(counts_are(enumerate_ensemble(EnsembleId::of(EnsembleKind::Symmetric), 2, 2), {4, 3, 1}, 8),
            "symmetric 2x2 GF(2)");
  o.require(counts_are(enumerate_ensemble(EnsembleId::of(EnsembleKind::Hermitian), 3, 1), {2, 1}, 3),
            "hermitian 1x1 GF(9)");

  std::size_t cases = 0;
  auto compare = [&](const EnsembleId& e, long q, long n, Realization r) {
    EnumerationResult res;
    try {
      res = enumerate_ensemble(e, q, n, r);
    } catch (const std::length_error&) {
      return;
    } catch (const std::invalid_argument&) {
      return;
    }
    ++cases;
    const RankPmf pmf = finite_pmf(e, q, n);
    bool ok = static_cast<long>(res.counts.size()) == pmf.kmax() + 1;
    for (long k = 0; ok && k <= pmf.kmax(); ++k)
      ok = Rational(res.counts[static_cast<std::size_t>(k)], res.total) == pmf.probs(k);
    o.require(ok, "enumeration " + cell(e, q, n));
  };
  for (const auto& e : all_ensembles(0))
    for (long q : {2, 3, 4, 5, 7, 8, 9})
      for (long n : range(1, 6))
        if (parity_ok(e, n)) compare(e, q, n, Realization::Default);
  for (long m = 1; m <= 3; ++m)
    for (long q : {2, 3})
      for (long n : range(1, 3)) compare(EnsembleId::uniform(m), q, n, Realization::Default);
  for (long n : range(2, 5)) compare(resolve_ensemble("zerodiag", 0, n), 3, n, Realization::Skew);
  for (long n : range(2, 5)) compare(resolve_ensemble("zerodiag", 0, n), 2, n, Realization::Symplectic);

  std::size_t qb = 0;
  for (long q : range(2, 4))
    for (long n : range(0, 8))
      for (long m : range(0, 3)) {
        const RankPmf pmf = finite_pmf(EnsembleId::uniform(m), q, n);
        for (long k = 0; k <= n; ++k, ++qb)
          o.require(rank_count_qbinomial(n, n + m, n - k, q) == pmf.probs(k), "q-binomial " + cell(pmf.ensemble, q, n));
      }
  o.note << cases << " enumerated cases, " << qb << " q-binomial terms";
}

void criterion6(Outcome& o) {
  std::size_t cases = 0;
  for (long q : {3, 5})
    for (long n = 0; n <= 12; n += 2) {
      ++cases;
      o.require(skewcentro_even_reduction(q, n).equal, "reduction q=" + std::to_string(q) + " n=" + std::to_string(n));
      if (n > 0) {
        const RankPmf a = finite_pmf(EnsembleId::of(EnsembleKind::SkewCentroEven), q, n);
        const RankPmf b = finite_pmf(EnsembleId::uniform(0), q, n / 2);
        o.require(a.probs == b.probs, "term-exact pmf q=" + std::to_string(q) + " n=" + std::to_string(n));
      }
    }
  o.note << cases << " (q, n) pairs";
}

void criterion7(Outcome& o) {
  std::size_t chains = 0;
  for (long q : range(2, 5))
    for (long n : range(1, 12))
      for (long m : range(0, 3)) {
        ++chains;
        const RankChain c = build_chain(q, n, m);
        o.require(stationarity_defect(c).isZero(), "defect q=" + std::to_string(q) + " n=" + std::to_string(n));
        for (const auto& chk : verify_stationarity(c)) o.require(chk.pass, chk.name);
      }
  double worst = 0;
  for (auto [q, n, m] : {std::tuple{2L, 4L, 0L}, std::tuple{3L, 3L, 1L}}) {
    const ChainSimulation s = simulate_chain_vs_matrix(q, n, m, kMarkovSteps, kMarkovSeed);
    worst = std::max({worst, s.tv_chain, s.tv_matrix});
    o.require(s.tv_chain < kMarkovTv && s.tv_matrix < kMarkovTv, "simulation q=" + std::to_string(q));
  }
  o.note << chains << " chains exact, worst simulated TV " << worst << " < " << kMarkovTv;
}

void criterion8(Outcome& o) {
  struct Case {
    EnsembleId e;
    long q, n;
    Realization r;
  };
  const std::vector<Case> cases{
      {EnsembleId::uniform(0), 2, 6, Realization::Default},
      {EnsembleId::uniform(1), 3, 5, Realization::Default},
      {EnsembleId::of(EnsembleKind::Symmetric), 3, 5, Realization::Default},
      {EnsembleId::of(EnsembleKind::ZeroDiagEven), 2, 6, Realization::Symplectic},
      {EnsembleId::of(EnsembleKind::ZeroDiagEven), 3, 4, Realization::Skew},
      {EnsembleId::of(EnsembleKind::ZeroDiagOdd), 2, 5, Realization::Default},
      {EnsembleId::of(EnsembleKind::SkewCentroEven), 3, 6, Realization::Default},
      {EnsembleId::of(EnsembleKind::SkewCentroOdd), 3, 5, Realization::Default},
      {EnsembleId::of(EnsembleKind::Hermitian), 3, 4, Realization::Default},
  };
  double worst = 0;
  for (const auto& c : cases) {
    const EmpiricalPmf a = empirical_pmf(c.e, c.q, c.n, kEmpiricalTrials, kEmpiricalSeed, 1, c.r);
    const EmpiricalPmf b = empirical_pmf(c.e, c.q, c.n, kEmpiricalTrials, kEmpiricalSeed, 4, c.r);
    worst = std::max(worst, a.empirical_tv);
    o.require(a.empirical_tv < kEmpiricalTv, "TV " + cell(c.e, c.q, c.n));
    o.require(a.counts == b.counts, "determinism " + cell(c.e, c.q, c.n));
  }
  o.note << cases.size() << " ensembles, worst TV " << worst << " < " << kEmpiricalTv;
}

void criterion9(Outcome& o) {
  std::size_t checks = 0;
  for (long q : range(2, 9)) {
    const auto rep = check_product_inequalities(q, kProductNMax);
    for (const auto& c : rep.checks) {
      ++checks;
      o.require(c.pass, c.claim + " q=" + std::to_string(q) + " n=" + std::to_string(c.n));
    }
  }
  o.note << checks << " inequalities";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"uniform TV window, q<=5, m<=2, n<=10", criterion1},
      {"structured-ensemble TV windows, q<=5, n<=10", criterion2},
      {"moment identities exact, q<=5, n<=12", criterion3},
      {"Stein registration and solution bounds", criterion4},
      {"enumeration and q-binomial oracles", criterion5},
      {"skew centrosymmetric even reduction", criterion6},
      {"Markov stationarity and simulation", criterion7},
      {"Monte-Carlo consistency", criterion8},
      {"product inequalities, q<=9, n<=30", criterion9},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.note.str() << ", " << secs << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
