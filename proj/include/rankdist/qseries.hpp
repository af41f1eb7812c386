#pragma once

#include "rankdist/interval.hpp"

#include <string>
#include <vector>

namespace rankdist {

/// prod_{i=lo}^{hi} (1 + sign * q^-i); the empty product (hi < lo) is 1.
Rational finite_qproduct(long q, long lo, long hi, int sign = -1);

/// prod_{i=lo}^{hi} (q^i - 1), an integer.
Integer qfactorial_range(long q, long lo, long hi);

/// Infinite product prod_{i >= start, i = start mod step} (1 + sign * q^-i),
/// with factors up to index `trunc` taken exactly.
struct QProductSpec {
  long q = 2;
  long start = 1;
  long step = 1;  // 1: every index, 2: every other index
  int sign = -1;
  long trunc = 64;
};

/// Certified enclosure of the infinite product described by `spec`.
///
/// With P the exact truncated product and t = 2 q^-(trunc+1) (which bounds
/// the sum of all omitted q^-i): sign -1 gives [P (1 - t), P], sign +1 gives
/// [P, P / (1 - t)]. Throws std::invalid_argument when t >= 1.
IntervalRat infinite_qproduct(const QProductSpec& spec);

/// Smallest truncation index T with 2 q^-(T+1) < 2^-64.
long default_qprod_trunc(long q);

/// Gaussian binomial [n choose m]_q; zero outside 0 <= m <= n.
Integer qbinomial(long n, long m, long q);

struct InequalityCheck {
  std::string claim;
  long q = 0;
  long n = -1;  // -1 for the infinite products
  long m = -1;
  IntervalRat lhs;  // the product (a point for finite products)
  Rational rhs;
  bool pass = false;
};

struct ProductInequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
  std::size_t failures() const;
};

/// Checks the lower bounds for prod (1 - q^-i) over the factor sets
/// {1..n}, {i >= 1}, odd {i >= 1}, odd {i >= 3} and {m+1..n}, together with
/// prod (1 - a_i) >= 1 - sum a_i on each of those sets, for every
/// 0 <= m+1 <= n <= n_max. Failures are recorded, never thrown.
ProductInequalityReport check_product_inequalities(long q, long n_max);

}  // namespace rankdist
