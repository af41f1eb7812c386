#pragma once

#include "rankdist/rational.hpp"
#include "rankdist/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace rankdist {

/// Birth-death chain on Q = n - rank in {0..n} for an n x (n+m) matrix that
/// gains a uniformly chosen rank-one matrix at each step.
struct RankChain {
  long q = 2, n = 1, m = 0;
  Matrix<Rational> transitions;  ///< (n+1) x (n+1), tridiagonal

  const Rational& operator()(long i, long j) const { return transitions(i, j); }
};

/// M(i,i+1) = q^{n-i-1}(q^{n-i}-1) / ((q^n-1)(q^{n+m}-1)),
/// M(i,i-1) = (q^n-q^{n-i})(q^{n+m}-q^{n-i}) / ((q^n-1)(q^{n+m}-1)),
/// M(i,i) = 1 - M(i,i-1) - M(i,i+1).
RankChain build_chain(long q, long n, long m);

/// Row sums, entry range, pi M = pi with pi the uniform-ensemble pmf, and
/// detailed balance, all exact.
Report verify_stationarity(const RankChain& chain);

/// Exact pi M - pi.
Vector<Rational> stationarity_defect(const RankChain& chain);

/// Exact TV(delta_start M^t, pi) for t = 0..t_max.
std::vector<Rational> tv_to_stationarity(const RankChain& chain, long start, long t_max);

struct ChainSimulation {
  long q = 0, n = 0, m = 0;
  long steps = 0, burn_in = 0;
  std::uint64_t seed = 0;
  std::vector<long> occupation_chain;   ///< visits to Q = k after burn-in
  std::vector<long> occupation_matrix;
  double tv_chain = 0;
  double tv_matrix = 0;
  Rational stationarity_defect;  ///< max |pi M - pi|
};

/// Runs the chain from its transition matrix (stream 0) and the matrix
/// process A <- A + u v^T with u, v uniform nonzero (stream 1), both started
/// at the zero matrix (state n). Occupation is counted over `steps`
/// transitions after `burn_in` (default 10 n). Throws std::invalid_argument
/// for steps < 1 or an unsupported field.
ChainSimulation simulate_chain_vs_matrix(long q, long n, long m, long steps, std::uint64_t seed,
                                         std::optional<long> burn_in = std::nullopt);

nlohmann::json to_json(const RankChain& chain);
nlohmann::json to_json(const ChainSimulation& sim);

}  // namespace rankdist
