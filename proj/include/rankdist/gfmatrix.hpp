#pragma once

#include "rankdist/ensembles.hpp"
#include "rankdist/field.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rankdist {

/// Counter-based generator: output i of stream (seed, stream) is a fixed
/// mix of (key, i), so any block of draws is reproducible in isolation.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on {0..bound-1} by rejection; bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform on [0, 1).
  double unit();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

using ElemMatrix = Eigen::Matrix<Elem, Eigen::Dynamic, Eigen::Dynamic>;

struct MatrixGF {
  FieldPtr field;
  ElemMatrix entries;

  MatrixGF() = default;
  MatrixGF(FieldPtr f, Eigen::Index rows, Eigen::Index cols) : field(std::move(f)), entries(ElemMatrix::Zero(rows, cols)) {}

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
  Elem operator()(Eigen::Index i, Eigen::Index j) const { return entries(i, j); }
  Elem& operator()(Eigen::Index i, Eigen::Index j) { return entries(i, j); }

  static MatrixGF identity(FieldPtr f, Eigen::Index n);
  MatrixGF transpose() const;
};

MatrixGF operator*(const MatrixGF& a, const MatrixGF& b);
MatrixGF operator+(const MatrixGF& a, const MatrixGF& b);

/// Rows of field digits, one text line per row (debug dump).
std::ostream& operator<<(std::ostream& os, const MatrixGF& m);

/// GF(2) matrix with each row packed into 64-bit words.
class PackedGF2 {
 public:
  PackedGF2(Eigen::Index rows, Eigen::Index cols);
  explicit PackedGF2(const MatrixGF& m);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool get(Eigen::Index i, Eigen::Index j) const;
  void set(Eigen::Index i, Eigen::Index j, bool v);
  void randomize(CounterRng& rng);

  /// Rank by row XOR elimination on whole words.
  long rank() const;

 private:
  Eigen::Index rows_, cols_, words_;
  std::vector<std::uint64_t> bits_;
};

/// Rank by fraction-free elimination, pivot = first nonzero in the column.
long rank_generic(const MatrixGF& m);

/// Rank; the packed path is used over GF(2).
long rank(const MatrixGF& m);

/// How an ensemble is realised as matrices.
enum class Realization {
  Default,     ///< symplectic for even q, skew-symmetric for odd q (ZeroDiag)
  Symplectic,  ///< symmetric with zero diagonal, characteristic 2 only
  Skew,        ///< skew-symmetric with zero diagonal
};

/// Matrix layout: each entry is 0, or +-/conjugate of one free coordinate.
struct Layout {
  enum class Op : std::uint8_t { Zero, Ident, Neg, Conj };
  struct Rule {
    Op op = Op::Zero;
    int var = -1;
  };

  long rows = 0, cols = 0;
  bool extension = false;           ///< entries live in GF(q^2), coordinates counted over GF(q)
  std::vector<bool> subfield_only;  ///< per free coordinate: drawn from the prime subfield
  std::vector<Rule> rules;          ///< row-major

  std::size_t free_count() const { return subfield_only.size(); }
  /// log_q of the ensemble size, counting a GF(q^2) coordinate as 2.
  long cardinality_exponent() const;
};

/// Uniform sampler for one (ensemble, q, n). Throws std::invalid_argument
/// when the ensemble is not realisable over the field.
class EnsembleSampler {
 public:
  EnsembleSampler(const EnsembleId& e, long q, long n, Realization r = Realization::Default);

  const EnsembleId& ensemble() const { return ensemble_; }
  long q() const { return q_; }
  long n() const { return n_; }
  const FieldPtr& field() const { return field_; }
  const Layout& layout() const { return layout_; }

  MatrixGF sample(CounterRng& rng) const;
  /// Fills coordinates from `values` (one per free coordinate).
  MatrixGF assemble(const std::vector<Elem>& values) const;
  /// Whether `m` satisfies the ensemble's defining relations.
  bool satisfies_relations(const MatrixGF& m) const;
  /// The statistic Q for `m`: n - rank, halved or shifted for even-rank
  /// ensembles. Throws std::logic_error if a skew centrosymmetric or
  /// zero-diagonal sample has odd rank.
  long statistic(const MatrixGF& m) const;

 private:
  EnsembleId ensemble_;
  long q_, n_;
  Realization realization_;
  FieldPtr field_;
  Layout layout_;
};

struct EmpiricalPmf {
  EnsembleId ensemble;
  long q = 0, n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<long> counts;  ///< index k
  RankPmf exact;
  double empirical_tv = 0;
  double chi2 = 0;
};

/// `trials` samples split into fixed blocks; block b draws from stream b,
/// so counts depend on the seed only, never on `workers`.
EmpiricalPmf empirical_pmf(const EnsembleId& e, long q, long n, long trials, std::uint64_t seed, int workers = 1,
                           Realization r = Realization::Default);

struct EnumerationResult {
  std::vector<Integer> counts;  ///< index k
  Integer total;
};

inline constexpr long kEnumerationGuard = 1L << 24;

/// Exhaustive rank tally over every matrix of the ensemble. Throws
/// std::length_error if the ensemble has more than 2^24 members.
EnumerationResult enumerate_ensemble(const EnsembleId& e, long q, long n, Realization r = Realization::Default);

struct BenchRow {
  long size = 0;
  long rank_packed = 0, rank_generic = 0;
  double seconds_packed = 0, seconds_generic = 0;
};

/// Times the packed and generic GF(2) rank on one random matrix per size.
std::vector<BenchRow> bench_rank(const std::vector<long>& sizes, std::uint64_t seed);

nlohmann::json to_json(const EmpiricalPmf& h);

}  // namespace rankdist
