#include "rankdist/gfmatrix.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rankdist {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGamma) ^ mix64(stream * kGamma + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next() { return mix64(key_ + (++counter_) * kGamma); }

std::uint64_t CounterRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("CounterRng::below: bound must be >= 1");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double CounterRng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

MatrixGF MatrixGF::identity(FieldPtr f, Eigen::Index n) {
  MatrixGF m(std::move(f), n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

MatrixGF MatrixGF::transpose() const {
  MatrixGF t;
  t.field = field;
  t.entries = entries.transpose();
  return t;
}

MatrixGF operator*(const MatrixGF& a, const MatrixGF& b) {
  if (a.cols() != b.rows() || a.field->q() != b.field->q()) throw std::invalid_argument("MatrixGF: shape mismatch");
  const Field& F = *a.field;
  MatrixGF c(a.field, a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Elem s = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s = F.add(s, F.mul(a(i, k), b(k, j)));
      c(i, j) = s;
    }
  return c;
}

MatrixGF operator+(const MatrixGF& a, const MatrixGF& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("MatrixGF: shape mismatch");
  MatrixGF c(a.field, a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) c(i, j) = a.field->add(a(i, j), b(i, j));
  return c;
}

std::ostream& operator<<(std::ostream& os, const MatrixGF& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
  return os;
}

PackedGF2::PackedGF2(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(static_cast<std::size_t>(rows * words_), 0) {}

PackedGF2::PackedGF2(const MatrixGF& m) : PackedGF2(m.rows(), m.cols()) {
  if (m.field->q() != 2) throw std::invalid_argument("PackedGF2: matrix is not over GF(2)");
  for (Eigen::Index i = 0; i < rows_; ++i)
    for (Eigen::Index j = 0; j < cols_; ++j) set(i, j, m(i, j) != 0);
}

bool PackedGF2::get(Eigen::Index i, Eigen::Index j) const {
  return (bits_[static_cast<std::size_t>(i * words_ + j / 64)] >> (j % 64)) & 1U;
}

void PackedGF2::set(Eigen::Index i, Eigen::Index j, bool v) {
  auto& w = bits_[static_cast<std::size_t>(i * words_ + j / 64)];
  const std::uint64_t bit = std::uint64_t{1} << (j % 64);
  w = v ? (w | bit) : (w & ~bit);
}

void PackedGF2::randomize(CounterRng& rng) {
  const std::uint64_t last_mask = cols_ % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (cols_ % 64)) - 1;
  for (Eigen::Index i = 0; i < rows_; ++i)
    for (Eigen::Index w = 0; w < words_; ++w)
      bits_[static_cast<std::size_t>(i * words_ + w)] = rng.next() & (w + 1 == words_ ? last_mask : ~std::uint64_t{0});
}

long PackedGF2::rank() const {
  std::vector<std::uint64_t> b = bits_;
  auto row = [&](Eigen::Index i) { return b.data() + i * words_; };
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols_ && r < rows_; ++c) {
    const Eigen::Index w = c / 64;
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    Eigen::Index piv = r;
    while (piv < rows_ && !(row(piv)[w] & bit)) ++piv;
    if (piv == rows_) continue;
    if (piv != r) std::swap_ranges(row(piv), row(piv) + words_, row(r));
    const std::uint64_t* pr = row(r);
    for (Eigen::Index i = r + 1; i < rows_; ++i) {
      std::uint64_t* ri = row(i);
      if (ri[w] & bit)
        for (Eigen::Index k = w; k < words_; ++k) ri[k] ^= pr[k];
    }
    ++r;
  }
  return static_cast<long>(r);
}

long rank_generic(const MatrixGF& m) {
  const Field& F = *m.field;
  const Eigen::Index R = m.rows(), C = m.cols();
  Eigen::Matrix<Elem, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a = m.entries;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < C && r < R; ++c) {
    Eigen::Index piv = r;
    while (piv < R && a(piv, c) == 0) ++piv;
    if (piv == R) continue;
    if (piv != r) a.row(piv).swap(a.row(r));
    const Elem p = a(r, c);
    for (Eigen::Index i = r + 1; i < R; ++i) {
      const Elem x = a(i, c);
      if (x == 0) continue;
      // row_i <- p row_i - x row_r, no division needed
      for (Eigen::Index k = c; k < C; ++k) a(i, k) = F.sub(F.mul(p, a(i, k)), F.mul(x, a(r, k)));
    }
    ++r;
  }
  return static_cast<long>(r);
}

long rank(const MatrixGF& m) { return m.field->q() == 2 ? PackedGF2(m).rank() : rank_generic(m); }

long Layout::cardinality_exponent() const {
  long s = 0;
  for (bool sub : subfield_only) s += extension && !sub ? 2 : 1;
  return s;
}

namespace {

/// Union-find where each node carries x_node = sign * x_parent.
struct SignedUnionFind {
  std::vector<int> parent;
  std::vector<int> sign;
  std::vector<bool> pinned;  // x_root = -x_root forced

  explicit SignedUnionFind(int n) : parent(n), sign(n, 1), pinned(n, false) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }

  std::pair<int, int> find(int a) {
    int s = 1;
    int r = a;
    while (parent[r] != r) {
      s *= sign[r];
      r = parent[r];
    }
    return {r, s};
  }

  /// Imposes x_a = s * x_b.
  void relate(int a, int b, int s) {
    auto [ra, sa] = find(a);
    auto [rb, sb] = find(b);
    const int t = sa * s * sb;  // x_ra = t * x_rb
    if (ra == rb) {
      if (t != 1) pinned[ra] = true;
      return;
    }
    parent[ra] = rb;
    sign[ra] = t;
    pinned[rb] = pinned[rb] || pinned[ra];
  }
};

Layout build_layout(const EnsembleId& e, long n, Realization r, bool char2) {
  Layout L;
  L.rows = n;
  L.cols = e.kind == EnsembleKind::UniformRect ? n + e.m : n;
  L.rules.resize(static_cast<std::size_t>(L.rows * L.cols));
  auto at = [&](long i, long j) -> Layout::Rule& { return L.rules[static_cast<std::size_t>(i * L.cols + j)]; };
  auto fresh = [&](bool sub) {
    L.subfield_only.push_back(sub);
    return static_cast<int>(L.subfield_only.size() - 1);
  };

  switch (e.kind) {
    case EnsembleKind::UniformRect:
      for (long i = 0; i < L.rows; ++i)
        for (long j = 0; j < L.cols; ++j) at(i, j) = {Layout::Op::Ident, fresh(false)};
      break;
    case EnsembleKind::Symmetric:
      for (long i = 0; i < n; ++i)
        for (long j = i; j < n; ++j) {
          const int v = fresh(false);
          at(i, j) = {Layout::Op::Ident, v};
          at(j, i) = {Layout::Op::Ident, v};
        }
      break;
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: {
      const bool skew = r == Realization::Skew || (r == Realization::Default && !char2);
      for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
          const int v = fresh(false);
          at(i, j) = {Layout::Op::Ident, v};
          at(j, i) = {skew ? Layout::Op::Neg : Layout::Op::Ident, v};
        }
      break;
    }
    case EnsembleKind::SkewCentroEven:
    case EnsembleKind::SkewCentroOdd: {
      SignedUnionFind uf(static_cast<int>(n * n));
      auto idx = [n](long i, long j) { return static_cast<int>(i * n + j); };
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
          uf.relate(idx(i, j), idx(j, i), -1);
          uf.relate(idx(i, j), idx(n - 1 - j, n - 1 - i), +1);
        }
      std::vector<int> var_of(static_cast<std::size_t>(n * n), -1);
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
          auto [root, s] = uf.find(idx(i, j));
          if (uf.pinned[root]) continue;  // stays Zero
          if (var_of[root] < 0) var_of[root] = fresh(false);
          at(i, j) = {s > 0 ? Layout::Op::Ident : Layout::Op::Neg, var_of[root]};
        }
      break;
    }
    case EnsembleKind::Hermitian:
      L.extension = true;
      for (long i = 0; i < n; ++i) {
        at(i, i) = {Layout::Op::Ident, fresh(true)};
        for (long j = i + 1; j < n; ++j) {
          const int v = fresh(false);
          at(i, j) = {Layout::Op::Ident, v};
          at(j, i) = {Layout::Op::Conj, v};
        }
      }
      break;
  }
  return L;
}

}  // namespace

EnsembleSampler::EnsembleSampler(const EnsembleId& e, long q, long n, Realization r)
    : ensemble_(e), q_(q), n_(n), realization_(r) {
  if (n < 1) throw std::invalid_argument("EnsembleSampler: n must be >= 1");
  if (!parity_ok(e, n)) throw std::invalid_argument(e.name() + ": n has the wrong parity");
  long p = 0, deg = 0;
  if (!prime_power(q, &p, &deg)) throw std::invalid_argument("EnsembleSampler: q is not a prime power");
  const bool zero_diag = e.kind == EnsembleKind::ZeroDiagEven || e.kind == EnsembleKind::ZeroDiagOdd;
  if (r != Realization::Default && !zero_diag)
    throw std::invalid_argument("EnsembleSampler: --realize applies to the zero-diagonal ensemble only");
  switch (e.kind) {
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd:
      if (r == Realization::Symplectic && p != 2)
        throw std::invalid_argument("EnsembleSampler: the symplectic realization needs characteristic 2");
      if (p == 2 && q > 8) throw std::invalid_argument("EnsembleSampler: zero-diagonal sampling supports q in {2,4,8}");
      field_ = Field::make(q);
      break;
    case EnsembleKind::SkewCentroEven:
    case EnsembleKind::SkewCentroOdd:
      if (p == 2) throw std::invalid_argument("EnsembleSampler: skew centrosymmetric sampling needs odd q");
      field_ = Field::make(q);
      break;
    case EnsembleKind::Hermitian:
      if (p == 2 || deg != 1)
        throw std::invalid_argument("EnsembleSampler: Hermitian sampling needs an odd prime q (entries in GF(q^2))");
      field_ = Field::quadratic_extension(q);
      break;
    default:
      field_ = Field::make(q);
  }
  layout_ = build_layout(e, n, r, p == 2);
}

MatrixGF EnsembleSampler::assemble(const std::vector<Elem>& values) const {
  if (values.size() != layout_.free_count()) throw std::invalid_argument("assemble: wrong number of coordinates");
  const Field& F = *field_;
  MatrixGF m(field_, layout_.rows, layout_.cols);
  for (long i = 0; i < layout_.rows; ++i)
    for (long j = 0; j < layout_.cols; ++j) {
      const auto& rule = layout_.rules[static_cast<std::size_t>(i * layout_.cols + j)];
      switch (rule.op) {
        case Layout::Op::Zero: break;
        case Layout::Op::Ident: m(i, j) = values[rule.var]; break;
        case Layout::Op::Neg: m(i, j) = F.neg(values[rule.var]); break;
        case Layout::Op::Conj: m(i, j) = F.conj(values[rule.var]); break;
      }
    }
  return m;
}

MatrixGF EnsembleSampler::sample(CounterRng& rng) const {
  std::vector<Elem> values(layout_.free_count());
  for (std::size_t v = 0; v < values.size(); ++v)
    values[v] = static_cast<Elem>(rng.below(static_cast<std::uint64_t>(
        layout_.subfield_only[v] ? field_->p() : field_->q())));
  return assemble(values);
}

bool EnsembleSampler::satisfies_relations(const MatrixGF& m) const {
  const Field& F = *field_;
  if (m.rows() != layout_.rows || m.cols() != layout_.cols) return false;
  const long n = n_;
  switch (ensemble_.kind) {
    case EnsembleKind::UniformRect: return true;
    case EnsembleKind::Symmetric: return m.entries == m.entries.transpose();
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: {
      const bool skew = realization_ == Realization::Skew || (realization_ == Realization::Default && F.p() != 2);
      for (long i = 0; i < n; ++i) {
        if (m(i, i) != 0) return false;
        for (long j = 0; j < n; ++j)
          if (m(j, i) != (skew ? F.neg(m(i, j)) : m(i, j))) return false;
      }
      return true;
    }
    case EnsembleKind::SkewCentroEven:
    case EnsembleKind::SkewCentroOdd:
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
          if (m(i, j) != F.neg(m(j, i)) || m(i, j) != m(n - 1 - j, n - 1 - i)) return false;
      return true;
    case EnsembleKind::Hermitian:
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
          if (m(j, i) != F.conj(m(i, j))) return false;
      return true;
  }
  return false;
}

long EnsembleSampler::statistic(const MatrixGF& m) const {
  const long corank = n_ - rank(m);
  switch (ensemble_.kind) {
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::SkewCentroEven:
      if (corank % 2 != 0) throw std::logic_error(ensemble_.name() + ": sample has odd rank");
      return corank / 2;
    case EnsembleKind::ZeroDiagOdd:
    case EnsembleKind::SkewCentroOdd:
      if (corank % 2 != 1) throw std::logic_error(ensemble_.name() + ": sample has odd rank");
      return (corank - 1) / 2;
    default: return corank;
  }
}

EmpiricalPmf empirical_pmf(const EnsembleId& e, long q, long n, long trials, std::uint64_t seed, int workers,
                           Realization r) {
  if (trials < 1) throw std::invalid_argument("empirical_pmf: trials must be >= 1");
  if (workers < 1) throw std::invalid_argument("empirical_pmf: workers must be >= 1");
  const EnsembleSampler sampler(e, q, n, r);
  EmpiricalPmf h;
  h.ensemble = e;
  h.q = q;
  h.n = n;
  h.trials = trials;
  h.seed = seed;
  h.workers = workers;
  h.exact = finite_pmf(e, q, n);

  constexpr long kBlock = 1024;
  const long blocks = (trials + kBlock - 1) / kBlock;
  const auto K = static_cast<std::size_t>(h.exact.kmax() + 1);
  std::vector<std::vector<long>> per_block(static_cast<std::size_t>(blocks), std::vector<long>(K, 0));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long b = next++; b < blocks; b = next++) {
      CounterRng rng(seed, static_cast<std::uint64_t>(b));
      auto& counts = per_block[static_cast<std::size_t>(b)];
      const long todo = std::min(kBlock, trials - b * kBlock);
      for (long t = 0; t < todo; ++t) ++counts[static_cast<std::size_t>(sampler.statistic(sampler.sample(rng)))];
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min<long>(workers, blocks); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  h.counts.assign(K, 0);
  for (const auto& c : per_block)
    for (std::size_t k = 0; k < K; ++k) h.counts[k] += c[k];
  for (std::size_t k = 0; k < K; ++k) {
    const double p = to_double(h.exact.probs(static_cast<Eigen::Index>(k)));
    const double f = static_cast<double>(h.counts[k]) / static_cast<double>(trials);
    h.empirical_tv += std::abs(f - p) / 2;
    if (p > 0) {
      const double expect = p * static_cast<double>(trials);
      h.chi2 += (static_cast<double>(h.counts[k]) - expect) * (static_cast<double>(h.counts[k]) - expect) / expect;
    }
  }
  return h;
}

EnumerationResult enumerate_ensemble(const EnsembleId& e, long q, long n, Realization r) {
  const EnsembleSampler sampler(e, q, n, r);
  const Layout& L = sampler.layout();
  std::vector<long> radix;
  long total = 1;
  for (bool sub : L.subfield_only) {
    radix.push_back(sub ? sampler.field()->p() : sampler.field()->q());
    if (total > kEnumerationGuard / radix.back())
      throw std::length_error("enumerate_ensemble: ensemble has more than 2^24 members");
    total *= radix.back();
  }
  EnumerationResult res;
  res.counts.assign(static_cast<std::size_t>(support_max(e, n) + 1), Integer(0));
  res.total = total;
  std::vector<Elem> values(L.free_count(), 0);
  for (long t = 0; t < total; ++t) {
    ++res.counts[static_cast<std::size_t>(sampler.statistic(sampler.assemble(values)))];
    for (std::size_t v = 0; v < values.size(); ++v) {
      if (++values[v] < radix[v]) break;
      values[v] = 0;
    }
  }
  return res;
}

std::vector<BenchRow> bench_rank(const std::vector<long>& sizes, std::uint64_t seed) {
  if (sizes.empty()) throw std::invalid_argument("bench_rank: empty size list");
  using clock = std::chrono::steady_clock;
  const FieldPtr gf2 = Field::make(2);
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const long s = sizes[i];
    if (s < 1) throw std::invalid_argument("bench_rank: sizes must be >= 1");
    CounterRng rng(seed, i);
    PackedGF2 packed(s, s);
    packed.randomize(rng);
    MatrixGF dense(gf2, s, s);
    for (long a = 0; a < s; ++a)
      for (long b = 0; b < s; ++b) dense(a, b) = packed.get(a, b) ? 1 : 0;
    BenchRow row;
    row.size = s;
    auto t0 = clock::now();
    row.rank_packed = packed.rank();
    auto t1 = clock::now();
    row.rank_generic = rank_generic(dense);
    auto t2 = clock::now();
    row.seconds_packed = std::chrono::duration<double>(t1 - t0).count();
    row.seconds_generic = std::chrono::duration<double>(t2 - t1).count();
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const EmpiricalPmf& h) {
  return {{"ensemble", to_json(h.ensemble)}, {"q", h.q},
          {"n", h.n},
          {"trials", h.trials},
          {"seed", h.seed},
          {"workers", h.workers},
          {"counts", h.counts},
          {"exact", to_json(h.exact)},
          {"empirical_tv", h.empirical_tv},
          {"chi2", h.chi2}};
}

}  // namespace rankdist
