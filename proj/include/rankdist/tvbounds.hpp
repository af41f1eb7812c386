#pragma once

#include "rankdist/ensembles.hpp"
#include "rankdist/interval.hpp"
#include "rankdist/report.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rankdist {

/// Certified enclosure of (1/2) sum_k |p_{k,n} - p_k|, with p_{k,n} = 0 past
/// the finite support and the limit's tail mass added in full.
/// Requires limit.trunc_k >= pmf.kmax() and matching ensemble and q.
IntervalRat tv_distance(const RankPmf& pmf, const LimitPmf& limit);

/// Exact TV between two finite pmfs of possibly different support.
Rational tv_distance(const RankPmf& a, const RankPmf& b);

enum class TheoremVariant {
  Main,     ///< the window valid for every q >= 2
  Refined,  ///< Hermitian window valid for q >= 3
};

struct TheoremWindow {
  TheoremVariant variant = TheoremVariant::Main;
  std::string claim;
  Rational lower;
  Rational upper;
};

/// Windows stated for (e, q, n): one, or two for Hermitian at q >= 3.
/// Throws std::invalid_argument for n < 1 or the wrong parity.
std::vector<TheoremWindow> theorem_windows(const EnsembleId& e, long q, long n);

/// Truncation policy: trunc_k = support_max + k_extra, doubled on demand.
struct TruncConfig {
  long k_extra = 8;
  std::optional<long> qprod_trunc;  ///< nullopt: default_qprod_trunc(q)
  int max_refinements = 4;

  /// Defaults, with RANKDIST_TRUNC (an integer) overriding k_extra.
  static TruncConfig from_env();
};

struct TvResult {
  EnsembleId ensemble;
  long q = 0;
  long n = 0;
  TheoremVariant variant = TheoremVariant::Main;
  std::string claim;
  IntervalRat tv;
  Rational theorem_lower;
  Rational theorem_upper;
  bool pass = false;
  long trunc_k = 0;
  long qprod_trunc = 0;
  std::string error;  ///< set when no certificate was reached

  /// tv.lo / lower and upper / tv.hi; both exceed 1 on a pass.
  double lower_margin() const;
  double upper_margin() const;
};

/// Certifies the stated window, raising truncations until the enclosure is
/// strictly inside or strictly outside it. `error` is set if the budget runs
/// out with the enclosure still straddling a window edge.
TvResult verify_tv_theorem(const EnsembleId& e, long q, long n, TheoremVariant variant = TheoremVariant::Main,
                           const TruncConfig& cfg = {});

/// The even skew centrosymmetric window certified through the uniform square
/// ensemble at n/2, whose pmf it equals term by term.
TvResult verify_skewcentro_even_via_reduction(long q, long n, const TruncConfig& cfg = {});

struct GridCell {
  EnsembleId ensemble;
  long q = 0;
  long n = 0;
  TheoremVariant variant = TheoremVariant::Main;
};

/// Every parity-respecting cell for the ensembles, q and n ranges, with the
/// refined Hermitian window added at q >= 3.
std::vector<GridCell> theorem_grid(const std::vector<EnsembleId>& ensembles, const std::vector<long>& qs,
                                   long n_min, long n_max);

/// Results in grid order; a cell that throws yields pass = false with `error`.
std::vector<TvResult> tv_grid(const std::vector<GridCell>& cells, const TruncConfig& cfg = {}, int workers = 1);

/// Structural checks on one cell: the lower-bound mechanism
/// (1/2)(p_{0,n} - p_0) <= TV (sign reversed for Hermitian odd n), the
/// maximizing-set identity and the triangle inequality through n + 2.
Report tv_consistency(const EnsembleId& e, long q, long n, const TruncConfig& cfg = {});

std::string variant_name(TheoremVariant v);
nlohmann::json to_json(const TvResult& r);
nlohmann::json to_json(const std::vector<TvResult>& rs);
void write_csv(std::ostream& os, const std::vector<TvResult>& rs);

}  // namespace rankdist
