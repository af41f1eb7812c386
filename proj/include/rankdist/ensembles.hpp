#pragma once

#include "rankdist/interval.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace rankdist {

enum class EnsembleKind {
  UniformRect,     ///< uniform n x (n+m)
  Symmetric,       ///< uniform symmetric n x n
  ZeroDiagEven,    ///< symmetric, zero diagonal (char 2) or skew-symmetric (odd q), n even
  ZeroDiagOdd,     ///< same, n odd
  SkewCentroEven,  ///< skew centrosymmetric, n even
  SkewCentroOdd,   ///< skew centrosymmetric, n odd
  Hermitian,       ///< Hermitian over GF(q^2)
};

struct EnsembleId {
  EnsembleKind kind = EnsembleKind::UniformRect;
  long m = 0;  ///< column excess; UniformRect only

  static EnsembleId uniform(long m = 0) { return {EnsembleKind::UniformRect, m}; }
  static EnsembleId of(EnsembleKind kind) { return {kind, 0}; }

  std::string name() const;
  friend bool operator==(const EnsembleId&, const EnsembleId&) = default;
};

/// All ensembles, with UniformRect at the given m.
std::vector<EnsembleId> all_ensembles(long m = 0);

/// Resolves a CLI family name ("uniform", "symmetric", "zerodiag",
/// "skewcentro", "hermitian") to the parity-appropriate EnsembleId.
EnsembleId resolve_ensemble(std::string_view family, long m, long n);

/// Family name without parity ("zerodiag" for both ZeroDiag kinds).
std::string family_name(const EnsembleId& e);

/// Whether n has the parity the ensemble requires.
bool parity_ok(const EnsembleId& e, long n);

/// Largest value of Q_n: n, n/2 or (n-1)/2 depending on the ensemble.
long support_max(const EnsembleId& e, long n);

/// Whether an actual matrix ensemble over GF(q) with this rank law exists
/// (formulas are rational functions of q and are evaluated for every q >= 2).
bool field_realizable(const EnsembleId& e, long q);

/// Exact pmf of Q_n = n - rank (halved for the even-rank ensembles).
struct RankPmf {
  EnsembleId ensemble;
  long q = 2;
  long n = 0;
  Vector<Rational> probs;  ///< indexed by k = 0..support_max

  long kmax() const { return static_cast<long>(probs.size()) - 1; }
  /// p_k, zero outside the support.
  Rational prob(long k) const;
  bool realizable() const { return field_realizable(ensemble, q); }
};

RankPmf finite_pmf(const EnsembleId& e, long q, long n);

/// Limiting pmf p_k = scale * weight(k), where `scale` is an infinite
/// q-product enclosed by an interval and weight(k) is exact.
struct LimitPmf {
  EnsembleId ensemble;
  long q = 2;
  long trunc_k = 0;
  long qprod_trunc = 0;
  Vector<Rational> weights;        ///< exact weight(k), k = 0..trunc_k
  IntervalRat scale;               ///< the normalising infinite product
  IntervalRat tail_weight;         ///< sum_{k > trunc_k} weight(k)
  std::vector<IntervalRat> probs;  ///< scale * weight(k)
  IntervalRat tail;                ///< scale * tail_weight

  /// p_k for k <= trunc_k.
  const IntervalRat& prob(long k) const { return probs.at(static_cast<std::size_t>(k)); }
  /// sum_{j >= k} weight(j) for 0 <= k <= trunc_k + 1.
  IntervalRat weight_from(long k) const;
  /// sum_{j <= k} weight(j), exact.
  Rational weight_upto(long k) const;
  /// sum of probs plus tail; must contain 1.
  IntervalRat total() const;
};

/// Exact weight(k) in p_k = scale * weight(k).
Rational limit_weight(const EnsembleId& e, long q, long k);

/// Interval enclosure of the normalising infinite product.
IntervalRat limit_scale(const EnsembleId& e, long q, long qprod_trunc);

/// Certified interval limit pmf. The tail past trunc_k is bounded by
/// p_{trunc_k} r / (1 - r), r = a(trunc_k+1) / b(trunc_k+1) the ratio of the
/// limit's characterizing pair; throws std::domain_error if r >= 1.
LimitPmf limit_pmf(const EnsembleId& e, long q, long trunc_k, long qprod_trunc);

/// Alternating q-binomial form of P(rank = r) for a uniform k_rows x n_cols
/// matrix over GF(q).
Rational rank_count_qbinomial(long k_rows, long n_cols, long r, long q);

/// Term-by-term comparison of the even skew centrosymmetric pmf (from its own
/// product count) against the uniform square pmf at n/2.
struct ReductionWitness {
  long q = 0;
  long n = 0;
  std::vector<Rational> skew_centro;
  std::vector<Rational> uniform_half;
  bool equal = false;
};

ReductionWitness skewcentro_even_reduction(long q, long n);

nlohmann::json to_json(const EnsembleId& e);
nlohmann::json to_json(const RankPmf& pmf);
nlohmann::json to_json(const LimitPmf& pmf);
nlohmann::json rational_json(const Rational& r);

}  // namespace rankdist
