#include "rankdist/ensembles.hpp"

#include "rankdist/qseries.hpp"
#include "rankdist/stein.hpp"

#include <stdexcept>

namespace rankdist {

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

bool is_prime_power(long q) {
  if (q < 2) return false;
  long p = 2;
  while (q % p != 0) ++p;
  while (q % p == 0) q /= p;
  return q == 1 && is_prime(p);
}

long binom2(long n) { return n * (n - 1) / 2; }

// Number of symmetric n x n matrices of rank r, scaled so the caller divides
// by q^{C(n+1,2)}.
Rational symmetric_count(long q, long n, long r) {
  long h = r / 2;
  Rational c = 1;
  for (long i = 1; i <= h; ++i) c *= Rational(ipow(q, 2 * i), ipow(q, 2 * i) - 1);
  for (long i = 0; i < r; ++i) c *= ipow(q, n - i) - 1;
  return c;
}

// Symmetric zero-diagonal (equivalently skew-symmetric at odd q) count of
// rank 2h.
Rational zero_diag_count(long q, long n, long h) {
  Rational c = 1;
  for (long i = 1; i <= h; ++i) c *= Rational(ipow(q, 2 * i - 2), ipow(q, 2 * i) - 1);
  for (long i = 0; i < 2 * h; ++i) c *= ipow(q, n - i) - 1;
  return c;
}

// Skew centrosymmetric count of rank 2h, n even.
Rational skew_centro_even_count(long q, long n, long h) {
  const long half = n / 2;
  Rational c = 1;
  for (long j = 0; j <= half - h - 1; ++j)
    c *= Rational(ipow(q, half) - ipow(q, j), ipow(q, half - h) - ipow(q, j));
  for (long i = 0; i < h; ++i) c *= ipow(q, half) - ipow(q, i);
  return c;
}

// Skew centrosymmetric count of rank 2h, n odd.
Rational skew_centro_odd_count(long q, long n, long h) {
  const long t = (n - 1) / 2;
  Rational c = 1;
  for (long j = 0; j <= t - h; ++j)
    c *= Rational(ipow(q, t + 1) - ipow(q, j), ipow(q, t + 1 - h) - ipow(q, j));
  for (long i = 0; i < h; ++i) c *= ipow(q, t) - ipow(q, i);
  return c;
}

// Hermitian n x n count of rank r over GF(q^2).
Rational hermitian_count(long q, long n, long r) {
  Rational c = Rational(ipow(q, binom2(r)));
  for (long i = 1; i <= r; ++i)
    c *= Rational(ipow(q, 2 * n - 2 * (r - i)) - 1, ipow(q, i) - ((i % 2 == 0) ? 1 : -1));
  return c;
}

void require_q(long q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
}

}  // namespace

std::string EnsembleId::name() const {
  switch (kind) {
    case EnsembleKind::UniformRect: return "uniform(m=" + std::to_string(m) + ")";
    case EnsembleKind::Symmetric: return "symmetric";
    case EnsembleKind::ZeroDiagEven: return "zerodiag-even";
    case EnsembleKind::ZeroDiagOdd: return "zerodiag-odd";
    case EnsembleKind::SkewCentroEven: return "skewcentro-even";
    case EnsembleKind::SkewCentroOdd: return "skewcentro-odd";
    case EnsembleKind::Hermitian: return "hermitian";
  }
  return "?";
}

std::string family_name(const EnsembleId& e) {
  switch (e.kind) {
    case EnsembleKind::UniformRect: return "uniform";
    case EnsembleKind::Symmetric: return "symmetric";
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: return "zerodiag";
    case EnsembleKind::SkewCentroEven:
    case EnsembleKind::SkewCentroOdd: return "skewcentro";
    case EnsembleKind::Hermitian: return "hermitian";
  }
  return "?";
}

std::vector<EnsembleId> all_ensembles(long m) {
  return {EnsembleId::uniform(m),
          EnsembleId::of(EnsembleKind::Symmetric),
          EnsembleId::of(EnsembleKind::ZeroDiagEven),
          EnsembleId::of(EnsembleKind::ZeroDiagOdd),
          EnsembleId::of(EnsembleKind::SkewCentroEven),
          EnsembleId::of(EnsembleKind::SkewCentroOdd),
          EnsembleId::of(EnsembleKind::Hermitian)};
}

EnsembleId resolve_ensemble(std::string_view family, long m, long n) {
  const bool even = n % 2 == 0;
  if (family == "uniform") {
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    return EnsembleId::uniform(m);
  }
  if (family == "symmetric") return EnsembleId::of(EnsembleKind::Symmetric);
  if (family == "zerodiag")
    return EnsembleId::of(even ? EnsembleKind::ZeroDiagEven : EnsembleKind::ZeroDiagOdd);
  if (family == "skewcentro")
    return EnsembleId::of(even ? EnsembleKind::SkewCentroEven : EnsembleKind::SkewCentroOdd);
  if (family == "hermitian") return EnsembleId::of(EnsembleKind::Hermitian);
  throw std::invalid_argument("unknown ensemble '" + std::string(family) + "'");
}

bool parity_ok(const EnsembleId& e, long n) {
  if (n < 0) return false;
  switch (e.kind) {
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::SkewCentroEven: return n % 2 == 0;
    case EnsembleKind::ZeroDiagOdd:
    case EnsembleKind::SkewCentroOdd: return n % 2 == 1;
    default: return true;
  }
}

long support_max(const EnsembleId& e, long n) {
  switch (e.kind) {
    case EnsembleKind::UniformRect:
    case EnsembleKind::Symmetric:
    case EnsembleKind::Hermitian: return n;
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::SkewCentroEven: return n / 2;
    case EnsembleKind::ZeroDiagOdd:
    case EnsembleKind::SkewCentroOdd: return (n - 1) / 2;
  }
  return n;
}

bool field_realizable(const EnsembleId& e, long q) {
  if (!is_prime_power(q)) return false;
  switch (e.kind) {
    case EnsembleKind::SkewCentroEven:
    case EnsembleKind::SkewCentroOdd:
    case EnsembleKind::Hermitian: return q % 2 == 1;
    default: return true;
  }
}

Rational RankPmf::prob(long k) const {
  if (k < 0 || k > kmax()) return 0;
  return probs(k);
}

RankPmf finite_pmf(const EnsembleId& e, long q, long n) {
  require_q(q);
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (!parity_ok(e, n)) throw std::invalid_argument(e.name() + ": n has the wrong parity");

  RankPmf pmf{e, q, n, Vector<Rational>(support_max(e, n) + 1)};
  const long K = pmf.kmax();
  switch (e.kind) {
    case EnsembleKind::UniformRect: {
      const long m = e.m;
      const Rational full = finite_qproduct(q, 1, n + m);
      for (long k = 0; k <= K; ++k)
        pmf.probs(k) = qpow(q, -k * (m + k)) * full * finite_qproduct(q, k + 1, n) /
                       (finite_qproduct(q, 1, n - k) * finite_qproduct(q, 1, m + k));
      break;
    }
    case EnsembleKind::Symmetric: {
      const Rational total = Rational(ipow(q, binom2(n + 1)));
      for (long k = 0; k <= K; ++k) pmf.probs(k) = symmetric_count(q, n, n - k) / total;
      break;
    }
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: {
      const Rational total = Rational(ipow(q, binom2(n)));
      const long shift = e.kind == EnsembleKind::ZeroDiagOdd ? 1 : 0;
      for (long k = 0; k <= K; ++k) pmf.probs(k) = zero_diag_count(q, n, (n - shift - 2 * k) / 2) / total;
      break;
    }
    case EnsembleKind::SkewCentroEven: {
      const Rational total = Rational(ipow(q, (n / 2) * (n / 2)));
      for (long k = 0; k <= K; ++k) pmf.probs(k) = skew_centro_even_count(q, n, (n - 2 * k) / 2) / total;
      break;
    }
    case EnsembleKind::SkewCentroOdd: {
      const long t = (n - 1) / 2;
      const Rational total = Rational(ipow(q, t * t + t));
      for (long k = 0; k <= K; ++k) pmf.probs(k) = skew_centro_odd_count(q, n, (n - 2 * k - 1) / 2) / total;
      break;
    }
    case EnsembleKind::Hermitian: {
      const Rational total = Rational(ipow(q, n * n));
      for (long k = 0; k <= K; ++k) pmf.probs(k) = hermitian_count(q, n, n - k) / total;
      break;
    }
  }
  return pmf;
}

Rational limit_weight(const EnsembleId& e, long q, long k) {
  require_q(q);
  if (k < 0) return 0;
  switch (e.kind) {
    case EnsembleKind::UniformRect:
      return qpow(q, -k * (e.m + k)) / (finite_qproduct(q, 1, k) * finite_qproduct(q, 1, e.m + k));
    case EnsembleKind::SkewCentroEven:
      return qpow(q, -k * k) / (finite_qproduct(q, 1, k) * finite_qproduct(q, 1, k));
    case EnsembleKind::Symmetric: return Rational(Integer(1), qfactorial_range(q, 1, k));
    case EnsembleKind::ZeroDiagEven: return Rational(ipow(q, 2 * k), qfactorial_range(q, 1, 2 * k));
    case EnsembleKind::ZeroDiagOdd: return Rational(ipow(q, 2 * k + 1), qfactorial_range(q, 1, 2 * k + 1));
    case EnsembleKind::SkewCentroOdd: {
      Rational pk = finite_qproduct(q, 1, k);
      return 1 / (qpow(q, k * k + k) * (1 - qpow(q, -(k + 1))) * pk * pk);
    }
    case EnsembleKind::Hermitian:
      return 1 / (qpow(q, k * k) * finite_qproduct(q, 1, k) * finite_qproduct(q, 1, k, +1));
  }
  return 0;
}

IntervalRat limit_scale(const EnsembleId& e, long q, long qprod_trunc) {
  switch (e.kind) {
    case EnsembleKind::UniformRect:
    case EnsembleKind::SkewCentroEven:
    case EnsembleKind::SkewCentroOdd: return infinite_qproduct({q, 1, 1, -1, qprod_trunc});
    case EnsembleKind::Symmetric:
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: return infinite_qproduct({q, 1, 2, -1, qprod_trunc});
    case EnsembleKind::Hermitian: {
      IntervalRat plus = infinite_qproduct({q, 1, 2, +1, qprod_trunc});
      return IntervalRat(1 / plus.hi(), 1 / plus.lo());
    }
  }
  return IntervalRat(1);
}

IntervalRat LimitPmf::weight_from(long k) const {
  if (k > trunc_k + 1) throw std::out_of_range("weight_from: past the truncation");
  IntervalRat s = tail_weight;
  Rational exact = 0;
  for (long j = std::max(k, 0L); j <= trunc_k; ++j) exact += weights(j);
  return s + IntervalRat(exact);
}

Rational LimitPmf::weight_upto(long k) const {
  if (k > trunc_k) throw std::out_of_range("weight_upto: past the truncation");
  Rational s = 0;
  for (long j = 0; j <= k; ++j) s += weights(j);
  return s;
}

IntervalRat LimitPmf::total() const {
  IntervalRat t = tail;
  for (const auto& p : probs) t += p;
  return t;
}

LimitPmf limit_pmf(const EnsembleId& e, long q, long trunc_k, long qprod_trunc) {
  require_q(q);
  if (trunc_k < 4) throw std::invalid_argument("limit_pmf: trunc_k must be >= 4");
  LimitPmf L;
  L.ensemble = e;
  L.q = q;
  L.trunc_k = trunc_k;
  L.qprod_trunc = qprod_trunc;
  L.weights.resize(trunc_k + 1);
  for (long k = 0; k <= trunc_k; ++k) L.weights(k) = limit_weight(e, q, k);

  // p_{k+1} / p_k = a(k+1) / b(k+1) with a constant and b increasing, so
  // the tail is dominated by a geometric series with the ratio at trunc_k+1.
  SteinPair pair = stein_pair(e, q, std::nullopt, /*register_check=*/false);
  const Rational b = pair.b(trunc_k + 1);
  if (b <= 0) throw std::domain_error("limit_pmf: trunc_k too small (b <= 0)");
  const Rational r = pair.a(trunc_k + 1) / b;
  if (r >= 1) throw std::domain_error("limit_pmf: trunc_k too small (ratio >= 1)");
  L.tail_weight = IntervalRat(limit_weight(e, q, trunc_k + 1), L.weights(trunc_k) * r / (1 - r));

  L.scale = limit_scale(e, q, qprod_trunc);
  L.probs.reserve(static_cast<std::size_t>(trunc_k + 1));
  for (long k = 0; k <= trunc_k; ++k) L.probs.push_back(L.scale * IntervalRat(L.weights(k)));
  L.tail = L.scale * L.tail_weight;
  return L;
}

Rational rank_count_qbinomial(long k_rows, long n_cols, long r, long q) {
  require_q(q);
  if (r < 0 || r > std::min(k_rows, n_cols)) throw std::invalid_argument("rank_count_qbinomial: r out of range");
  Integer s = 0;
  for (long l = 0; l <= r; ++l) {
    Integer term = qbinomial(r, l, q) * ipow(q, k_rows * l + binom2(r - l));
    if ((r - l) % 2 == 0)
      s += term;
    else
      s -= term;
  }
  return Rational(qbinomial(n_cols, r, q) * s, ipow(q, k_rows * n_cols));
}

ReductionWitness skewcentro_even_reduction(long q, long n) {
  if (n < 0 || n % 2 != 0) throw std::invalid_argument("skewcentro_even_reduction: n must be even");
  ReductionWitness w{q, n, {}, {}, true};
  RankPmf skew = finite_pmf(EnsembleId::of(EnsembleKind::SkewCentroEven), q, n);
  RankPmf square = finite_pmf(EnsembleId::uniform(0), q, n / 2);
  for (long k = 0; k <= skew.kmax(); ++k) {
    w.skew_centro.push_back(skew.probs(k));
    w.uniform_half.push_back(square.prob(k));
    w.equal = w.equal && skew.probs(k) == square.prob(k);
  }
  w.equal = w.equal && skew.kmax() == square.kmax();
  return w;
}

nlohmann::json rational_json(const Rational& r) { return to_string(r); }

nlohmann::json to_json(const EnsembleId& e) {
  nlohmann::json j = {{"family", family_name(e)}, {"kind", e.name()}};
  if (e.kind == EnsembleKind::UniformRect) j["m"] = e.m;
  return j;
}

nlohmann::json to_json(const RankPmf& pmf) {
  nlohmann::json probs = nlohmann::json::array();
  nlohmann::json approx = nlohmann::json::array();
  for (long k = 0; k <= pmf.kmax(); ++k) {
    probs.push_back(rational_json(pmf.probs(k)));
    approx.push_back(to_double(pmf.probs(k)));
  }
  return {{"ensemble", to_json(pmf.ensemble)},
          {"q", pmf.q},
          {"n", pmf.n},
          {"field_realizable", pmf.realizable()},
          {"probs", probs},
          {"approx", approx}};
}

nlohmann::json to_json(const LimitPmf& L) {
  // endpoints are rounded outward to a 2^-128 grid; still certified
  auto interval = [](const IntervalRat& x) {
    const IntervalRat r = round_outward(x, 128);
    return nlohmann::json{{"lo", rational_json(r.lo())}, {"hi", rational_json(r.hi())}};
  };
  nlohmann::json probs = nlohmann::json::array();
  nlohmann::json approx = nlohmann::json::array();
  for (long k = 0; k <= L.trunc_k; ++k) {
    probs.push_back(interval(L.prob(k)));
    approx.push_back(to_double(L.prob(k).mid()));
  }
  return {{"ensemble", to_json(L.ensemble)},
          {"q", L.q},
          {"trunc_k", L.trunc_k},
          {"qprod_trunc", L.qprod_trunc},
          {"field_realizable", field_realizable(L.ensemble, L.q)},
          {"probs", probs},
          {"approx", approx},
          {"tail", interval(L.tail)}};
}

}  // namespace rankdist
