#include "rankdist/tvbounds.hpp"

#include "rankdist/qseries.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace rankdist {

namespace {

constexpr unsigned kTvBits = 192;

using CacheKey = std::tuple<int, long, long, long, long>;

std::shared_ptr<const LimitPmf> cached_limit(const EnsembleId& e, long q, long trunc_k, long qprod_trunc) {
  static std::mutex mu;
  static std::map<CacheKey, std::shared_ptr<const LimitPmf>> cache;
  const CacheKey key{static_cast<int>(e.kind), e.m, q, trunc_k, qprod_trunc};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto made = std::make_shared<const LimitPmf>(limit_pmf(e, q, trunc_k, qprod_trunc));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(made)).first->second;
}

Rational over_qpow(long num, long den, long q, long e) { return Rational(num, den) * qpow(q, -e); }

long trunc_for(const TruncConfig& cfg, long kmax, int round) { return kmax + (cfg.k_extra << round); }

long qtrunc_for(const TruncConfig& cfg, long q, int round) {
  return (cfg.qprod_trunc ? *cfg.qprod_trunc : default_qprod_trunc(q)) << round;
}

}  // namespace

IntervalRat tv_distance(const RankPmf& pmf, const LimitPmf& limit) {
  if (!(pmf.ensemble == limit.ensemble) || pmf.q != limit.q)
    throw std::invalid_argument("tv_distance: ensemble or q mismatch");
  if (limit.trunc_k < pmf.kmax()) throw std::invalid_argument("tv_distance: limit truncated below the support");
  IntervalRat s = limit.tail;
  for (long k = 0; k <= limit.trunc_k; ++k) s = s + abs(IntervalRat(pmf.prob(k)) - limit.prob(k));
  s = s / IntervalRat(2);
  return round_outward(intersect(s, IntervalRat(0, 1)), kTvBits);
}

Rational tv_distance(const RankPmf& a, const RankPmf& b) {
  Rational s = 0;
  for (long k = 0; k <= std::max(a.kmax(), b.kmax()); ++k) s += bmp::abs(a.prob(k) - b.prob(k));
  return s / 2;
}

std::vector<TheoremWindow> theorem_windows(const EnsembleId& e, long q, long n) {
  if (q < 2) throw std::invalid_argument("theorem_windows: q must be >= 2");
  if (n < 1) throw std::invalid_argument("theorem_windows: the theorems need n >= 1");
  if (!parity_ok(e, n)) throw std::invalid_argument(e.name() + ": n has the wrong parity");
  const TheoremVariant M = TheoremVariant::Main;
  switch (e.kind) {
    case EnsembleKind::UniformRect: {
      const long p = n + e.m + 1;
      return {{M, "1/(8q^{n+m+1}) <= TV <= 3/q^{n+m+1}", over_qpow(1, 8, q, p), over_qpow(3, 1, q, p)}};
    }
    case EnsembleKind::Symmetric:
      if (n % 2 == 0)
        return {{M, ".18/q^{n+1} <= TV <= 2.25/q^{n+1} (n even)", over_qpow(18, 100, q, n + 1),
                 over_qpow(225, 100, q, n + 1)}};
      return {{M, ".18/q^{n+2} <= TV <= 2/q^{n+2} (n odd)", over_qpow(18, 100, q, n + 2), over_qpow(2, 1, q, n + 2)}};
    case EnsembleKind::ZeroDiagEven:
      return {{M, ".18/q^{n+1} <= TV <= 1.5/q^{n+1}", over_qpow(18, 100, q, n + 1), over_qpow(3, 2, q, n + 1)}};
    case EnsembleKind::ZeroDiagOdd:
      return {{M, ".37/q^{n+2} <= TV <= 2.2/q^{n+2}", over_qpow(37, 100, q, n + 2), over_qpow(22, 10, q, n + 2)}};
    case EnsembleKind::SkewCentroEven:
      return {{M, "1/(8q^{n/2+1}) <= TV <= 3/q^{n/2+1}", over_qpow(1, 8, q, n / 2 + 1),
               over_qpow(3, 1, q, n / 2 + 1)}};
    case EnsembleKind::SkewCentroOdd:
      return {{M, "1/(4q^{(n+3)/2}) <= TV <= 3/q^{(n+3)/2}", over_qpow(1, 4, q, (n + 3) / 2),
               over_qpow(3, 1, q, (n + 3) / 2)}};
    case EnsembleKind::Hermitian: {
      std::vector<TheoremWindow> w{
          {M, ".07/q^{n+1} <= TV <= 2.3/q^{n+1}", over_qpow(7, 100, q, n + 1), over_qpow(23, 10, q, n + 1)}};
      if (q >= 3)
        w.push_back({TheoremVariant::Refined, ".19/q^{n+1} <= TV <= 1.5/q^{n+1} (q >= 3)",
                     over_qpow(19, 100, q, n + 1), over_qpow(3, 2, q, n + 1)});
      return w;
    }
  }
  throw std::logic_error("theorem_windows: unknown ensemble");
}

TruncConfig TruncConfig::from_env() {
  TruncConfig cfg;
  if (const char* v = std::getenv("RANKDIST_TRUNC"); v && *v) {
    char* end = nullptr;
    const long k = std::strtol(v, &end, 10);
    if (*end != '\0' || k < 1) throw std::invalid_argument("RANKDIST_TRUNC must be a positive integer");
    cfg.k_extra = k;
  }
  return cfg;
}

double TvResult::lower_margin() const { return to_double(tv.lo() / theorem_lower); }

double TvResult::upper_margin() const {
  return tv.hi() == 0 ? std::numeric_limits<double>::infinity() : to_double(theorem_upper / tv.hi());
}

TvResult verify_tv_theorem(const EnsembleId& e, long q, long n, TheoremVariant variant, const TruncConfig& cfg) {
  const auto windows = theorem_windows(e, q, n);
  const TheoremWindow* window = nullptr;
  for (const auto& w : windows)
    if (w.variant == variant) window = &w;
  if (!window) throw std::invalid_argument("verify_tv_theorem: no " + variant_name(variant) + " window here");

  TvResult r;
  r.ensemble = e;
  r.q = q;
  r.n = n;
  r.variant = variant;
  r.claim = window->claim;
  r.theorem_lower = window->lower;
  r.theorem_upper = window->upper;

  const RankPmf pmf = finite_pmf(e, q, n);
  for (int round = 0; round <= cfg.max_refinements; ++round) {
    r.trunc_k = std::max<long>(trunc_for(cfg, pmf.kmax(), round), 4);
    r.qprod_trunc = qtrunc_for(cfg, q, round);
    r.tv = tv_distance(pmf, *cached_limit(e, q, r.trunc_k, r.qprod_trunc));
    const bool inside = r.theorem_lower <= r.tv.lo() && r.tv.hi() <= r.theorem_upper;
    const bool outside = r.tv.hi() < r.theorem_lower || r.theorem_upper < r.tv.lo();
    if (inside || outside) {
      r.pass = inside;
      return r;
    }
  }
  r.pass = false;
  r.error = "enclosure still straddles a window edge after refinement";
  return r;
}

TvResult verify_skewcentro_even_via_reduction(long q, long n, const TruncConfig& cfg) {
  const EnsembleId sce = EnsembleId::of(EnsembleKind::SkewCentroEven);
  const TheoremWindow window = theorem_windows(sce, q, n).front();
  if (!skewcentro_even_reduction(q, n).equal) {
    TvResult r;
    r.ensemble = sce;
    r.q = q;
    r.n = n;
    r.claim = window.claim;
    r.theorem_lower = window.lower;
    r.theorem_upper = window.upper;
    r.error = "skew centrosymmetric pmf differs from the uniform square pmf at n/2";
    return r;
  }
  TvResult r = verify_tv_theorem(EnsembleId::uniform(0), q, n / 2, TheoremVariant::Main, cfg);
  if (r.theorem_lower != window.lower || r.theorem_upper != window.upper)
    throw std::logic_error("verify_skewcentro_even_via_reduction: windows disagree");
  r.ensemble = sce;
  r.n = n;
  r.claim = window.claim + " via the uniform square case at n/2";
  return r;
}

std::vector<GridCell> theorem_grid(const std::vector<EnsembleId>& ensembles, const std::vector<long>& qs,
                                   long n_min, long n_max) {
  std::vector<GridCell> cells;
  for (const auto& e : ensembles)
    for (long q : qs)
      for (long n = std::max<long>(n_min, 1); n <= n_max; ++n) {
        if (!parity_ok(e, n)) continue;
        for (const auto& w : theorem_windows(e, q, n)) cells.push_back({e, q, n, w.variant});
      }
  return cells;
}

std::vector<TvResult> tv_grid(const std::vector<GridCell>& cells, const TruncConfig& cfg, int workers) {
  std::vector<TvResult> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const GridCell& c = cells[i];
      try {
        out[i] = verify_tv_theorem(c.ensemble, c.q, c.n, c.variant, cfg);
      } catch (const std::exception& ex) {
        TvResult r;
        r.ensemble = c.ensemble;
        r.q = c.q;
        r.n = c.n;
        r.variant = c.variant;
        r.error = ex.what();
        out[i] = std::move(r);
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

Report tv_consistency(const EnsembleId& e, long q, long n, const TruncConfig& cfg) {
  Report out;
  const std::string tag = e.name() + " q=" + std::to_string(q) + " n=" + std::to_string(n) + ": ";
  const RankPmf pmf = finite_pmf(e, q, n);
  const long trunc_k = std::max<long>(trunc_for(cfg, pmf.kmax() + 2, 0), 4);
  const long qt = qtrunc_for(cfg, q, 0);
  const auto limit = cached_limit(e, q, trunc_k, qt);
  const IntervalRat tv = tv_distance(pmf, *limit);

  {
    const bool flip = e.kind == EnsembleKind::Hermitian && n % 2 == 1;
    IntervalRat d = (IntervalRat(pmf.prob(0)) - limit->prob(0)) / IntervalRat(2);
    if (flip) d = -d;
    Check c{tag + "lower-bound mechanism",
            flip ? "(1/2)(p_0 - p_{0,n}) <= TV" : "(1/2)(p_{0,n} - p_0) <= TV",
            d.lo() > 0 && d.lo() <= tv.hi(), {}};
    c.detail = {{"half_gap", to_string(round_outward(d, kTvBits))}, {"tv", to_string(tv)}};
    out.push_back(std::move(c));
  }
  {
    IntervalRat gain(0);
    long ambiguous = 0;
    for (long k = 0; k <= limit->trunc_k; ++k) {
      const Rational pk = pmf.prob(k);
      if (pk > limit->prob(k).hi())
        gain = gain + (IntervalRat(pk) - limit->prob(k));
      else if (pk >= limit->prob(k).lo())
        ++ambiguous;
    }
    gain = round_outward(gain, kTvBits);
    Check c{tag + "maximizing set", "TV = P_n(A) - P(A), A = {k : p_{k,n} > p_k}",
            ambiguous == 0 && gain.intersects(tv), {}};
    c.detail = {{"gain", to_string(gain)}, {"tv", to_string(tv)}, {"ambiguous", ambiguous}};
    out.push_back(std::move(c));
  }
  {
    const RankPmf next = finite_pmf(e, q, n + 2);
    const Rational direct = tv_distance(pmf, next);
    const IntervalRat tv_next = tv_distance(next, *limit);
    Check c{tag + "triangle inequality", "TV(n, lim) <= TV(n, n+2) + TV(n+2, lim)",
            tv.lo() <= direct + tv_next.hi(), {}};
    c.detail = {{"tv", to_string(tv)}, {"tv_n_n2", to_string(direct)}, {"tv_n2", to_string(tv_next)}};
    out.push_back(std::move(c));
  }
  return out;
}

std::string variant_name(TheoremVariant v) { return v == TheoremVariant::Main ? "main" : "refined"; }

nlohmann::json to_json(const TvResult& r) {
  nlohmann::json j = {{"ensemble", to_json(r.ensemble)},
                      {"q", r.q},
                      {"n", r.n},
                      {"variant", variant_name(r.variant)},
                      {"claim", r.claim},
                      {"tv", {{"lo", to_string(r.tv.lo())}, {"hi", to_string(r.tv.hi())}}},
                      {"tv_approx", to_double(r.tv.mid())},
                      {"window", {{"lo", to_string(r.theorem_lower)}, {"hi", to_string(r.theorem_upper)}}},
                      {"pass", r.pass},
                      {"trunc_k", r.trunc_k},
                      {"qprod_trunc", r.qprod_trunc}};
  if (r.error.empty() && r.theorem_lower > 0) {
    j["lower_margin"] = r.lower_margin();
    j["upper_margin"] = r.upper_margin();
  } else if (!r.error.empty()) {
    j["error"] = r.error;
  }
  return j;
}

nlohmann::json to_json(const std::vector<TvResult>& rs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

void write_csv(std::ostream& os, const std::vector<TvResult>& rs) {
  os << "ensemble,q,n,variant,tv_lo,tv_hi,window_lo,window_hi,pass,lower_margin,upper_margin\n";
  const auto prec = os.precision(17);
  for (const auto& r : rs) {
    os << r.ensemble.name() << ',' << r.q << ',' << r.n << ',' << variant_name(r.variant) << ','
       << to_double(r.tv.lo()) << ',' << to_double(r.tv.hi()) << ',' << to_string(r.theorem_lower) << ','
       << to_string(r.theorem_upper) << ',' << (r.pass ? "true" : "false") << ',';
    if (r.error.empty() && r.theorem_lower > 0)
      os << r.lower_margin() << ',' << r.upper_margin();
    else
      os << ',';
    os << '\n';
  }
  os.precision(prec);
}

}  // namespace rankdist
