#include "rankdist/qseries.hpp"

#include <stdexcept>

namespace rankdist {

Rational finite_qproduct(long q, long lo, long hi, int sign) {
  if (q < 2) throw std::invalid_argument("finite_qproduct: q must be >= 2");
  if (hi < lo) return Rational(1);
  // prod (q^i + sign) / q^i, accumulated as one integer fraction.
  Integer num = 1;
  long exponent = 0;
  for (long i = lo; i <= hi; ++i) {
    num *= ipow(q, i) + sign;
    exponent += i;
  }
  return Rational(num, ipow(q, exponent));
}

Integer qfactorial_range(long q, long lo, long hi) {
  Integer r = 1;
  for (long i = lo; i <= hi; ++i) r *= ipow(q, i) - 1;
  return r;
}

IntervalRat infinite_qproduct(const QProductSpec& spec) {
  if (spec.q < 2) throw std::invalid_argument("infinite_qproduct: q must be >= 2");
  if (spec.step != 1 && spec.step != 2) throw std::invalid_argument("infinite_qproduct: step must be 1 or 2");
  if (spec.sign != 1 && spec.sign != -1) throw std::invalid_argument("infinite_qproduct: sign must be +-1");
  if (spec.start < 1 || spec.trunc < spec.start)
    throw std::invalid_argument("infinite_qproduct: need 1 <= start <= trunc");

  Rational tail = 2 * qpow(spec.q, -(spec.trunc + 1));
  if (tail >= 1) throw std::invalid_argument("infinite_qproduct: truncation too small for a tail bound");

  Integer num = 1;
  long exponent = 0;
  for (long i = spec.start; i <= spec.trunc; i += spec.step) {
    num *= ipow(spec.q, i) + spec.sign;
    exponent += i;
  }
  Rational partial(num, ipow(spec.q, exponent));
  if (spec.sign < 0) return IntervalRat(partial * (1 - tail), partial);
  return IntervalRat(partial, partial / (1 - tail));
}

long default_qprod_trunc(long q) {
  if (q < 2) throw std::invalid_argument("default_qprod_trunc: q must be >= 2");
  const Rational target = qpow(2, -64);
  long t = 1;
  while (2 * qpow(q, -(t + 1)) >= target) ++t;
  return t;
}

Integer qbinomial(long n, long m, long q) {
  if (m < 0 || m > n) return 0;
  Integer num = 1, den = 1;
  for (long j = 0; j < m; ++j) {
    num *= ipow(q, n - j) - 1;
    den *= ipow(q, m - j) - 1;
  }
  return num / den;
}

bool ProductInequalityReport::all_pass() const { return failures() == 0; }

std::size_t ProductInequalityReport::failures() const {
  std::size_t f = 0;
  for (const auto& c : checks) f += c.pass ? 0 : 1;
  return f;
}

namespace {

// sum_{i >= start, step} q^-i in closed form.
Rational geometric_tail(long q, long start, long step) {
  return qpow(q, -start) / (1 - qpow(q, -step));
}

Rational sum_inverse_powers(long q, long lo, long hi) {
  Rational s = 0;
  for (long i = lo; i <= hi; ++i) s += qpow(q, -i);
  return s;
}

}  // namespace

ProductInequalityReport check_product_inequalities(long q, long n_max) {
  ProductInequalityReport report;
  auto record = [&](std::string claim, long n, long m, IntervalRat lhs, Rational rhs) {
    bool pass = lhs.lo() >= rhs;
    report.checks.push_back({std::move(claim), q, n, m, std::move(lhs), std::move(rhs), pass});
  };

  const long trunc = default_qprod_trunc(q);
  const Rational one = 1;
  const Rational iq = qpow(q, -1);

  for (long n = 1; n <= n_max; ++n) {
    Rational p = finite_qproduct(q, 1, n);
    record("prod_{i=1}^n (1-q^-i) >= 1 - 1/q - 1/q^2", n, -1, p, one - iq - qpow(q, -2));
    record("prod_{i=1}^n (1-q^-i) >= 1 - sum_{i=1}^n q^-i", n, -1, p, one - sum_inverse_powers(q, 1, n));
  }

  // Infinite products: the truncation doubles until the enclosure decides.
  auto record_infinite = [&](std::string claim, QProductSpec spec, const Rational& rhs) {
    IntervalRat lhs = infinite_qproduct(spec);
    for (int round = 0; round < 4 && lhs.lo() < rhs && lhs.hi() >= rhs; ++round) {
      spec.trunc *= 2;
      lhs = infinite_qproduct(spec);
    }
    record(std::move(claim), -1, -1, std::move(lhs), rhs);
  };

  record_infinite("prod_{i>=1} (1-q^-i) >= 1-1/q-1/q^2+1/q^5+1/q^7-1/q^12-1/q^15", {q, 1, 1, -1, trunc},
                  one - iq - qpow(q, -2) + qpow(q, -5) + qpow(q, -7) - qpow(q, -12) - qpow(q, -15));
  record_infinite("prod_{i>=1} (1-q^-i) >= 1 - sum_{i>=1} q^-i", {q, 1, 1, -1, trunc},
                  one - geometric_tail(q, 1, 1));
  record_infinite("prod_{i>=1 odd} (1-q^-i) >= 1 - 1/q - 1/q^3", {q, 1, 2, -1, trunc}, one - iq - qpow(q, -3));
  record_infinite("prod_{i>=1 odd} (1-q^-i) >= 1 - sum_{i>=1 odd} q^-i", {q, 1, 2, -1, trunc},
                  one - geometric_tail(q, 1, 2));
  record_infinite("prod_{i>=3 odd} (1-q^-i) >= 1 - 2/q^3", {q, 3, 2, -1, trunc}, one - 2 * qpow(q, -3));
  record_infinite("prod_{i>=3 odd} (1-q^-i) >= 1 - sum_{i>=3 odd} q^-i", {q, 3, 2, -1, trunc},
                  one - geometric_tail(q, 3, 2));

  for (long n = 1; n <= n_max; ++n) {
    for (long m = -1; m + 1 <= n; ++m) {
      Rational p = finite_qproduct(q, m + 1, n);
      // the m = -1 set contains the factor i = 0, which is zero
      record("prod_{i=m+1}^n (1-q^-i) >= 1 - 2/q^{m+1}", n, m, p, one - 2 * qpow(q, -(m + 1)));
      record("prod_{i=m+1}^n (1-q^-i) >= 1 - sum_{i=m+1}^n q^-i", n, m, p,
             one - sum_inverse_powers(q, m + 1, n));
    }
  }
  return report;
}

}  // namespace rankdist
