#include "rankdist/field.hpp"

#include <stdexcept>

namespace rankdist {

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::vector<long> digits(long code, long p, long e) {
  std::vector<long> c(static_cast<std::size_t>(e));
  for (auto& x : c) {
    x = code % p;
    code /= p;
  }
  return c;
}

long undigits(const std::vector<long>& c, long p) {
  long code = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) code = code * p + *it;
  return code;
}

}  // namespace

bool prime_power(long q, long* p_out, long* e_out) {
  if (q < 2) return false;
  long p = 2;
  while (q % p != 0) ++p;
  long e = 0;
  for (long r = q; r > 1; r /= p, ++e)
    if (r % p != 0) return false;
  if (p_out) *p_out = p;
  if (e_out) *e_out = e;
  return true;
}

Field::Field(long p, long e, std::vector<long> modulus, long theta_sq)
    : p_(p), e_(e), q_(1), modulus_(std::move(modulus)), theta_sq_(theta_sq) {
  for (long i = 0; i < e; ++i) q_ *= p;
  const auto Q = static_cast<std::size_t>(q_);
  add_.resize(Q * Q);
  mul_.resize(Q * Q);
  neg_.resize(Q);
  inv_.assign(Q, 0);
  frob_.resize(Q);

  for (long a = 0; a < q_; ++a) {
    const auto da = digits(a, p, e);
    std::vector<long> n(da.size());
    for (std::size_t i = 0; i < da.size(); ++i) n[i] = (p - da[i]) % p;
    neg_[a] = static_cast<Elem>(undigits(n, p));
    for (long b = 0; b < q_; ++b) {
      const auto db = digits(b, p, e);
      std::vector<long> s(da.size());
      for (std::size_t i = 0; i < da.size(); ++i) s[i] = (da[i] + db[i]) % p;
      add_[a * q_ + b] = static_cast<Elem>(undigits(s, p));

      // schoolbook product, then reduce by the monic modulus from the top
      std::vector<long> prod(static_cast<std::size_t>(2 * e - 1), 0);
      for (long i = 0; i < e; ++i)
        for (long j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
      for (long d = 2 * e - 2; d >= e; --d) {
        const long c = prod[d];
        if (c == 0) continue;
        for (long i = 0; i <= e; ++i) prod[d - e + i] = ((prod[d - e + i] - c * modulus_[i]) % p + p) % p;
      }
      prod.resize(static_cast<std::size_t>(e));
      mul_[a * q_ + b] = static_cast<Elem>(undigits(prod, p));
    }
  }
  for (long a = 1; a < q_; ++a) {
    for (long b = 1; b < q_; ++b)
      if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elem>(b);
    if (inv_[a] == 0) throw std::logic_error("Field: modulus is reducible");
  }
  for (long a = 0; a < q_; ++a) {
    Elem x = 1;
    for (long i = 0; i < p; ++i) x = mul(x, static_cast<Elem>(a));
    frob_[a] = x;
  }
}

std::shared_ptr<const Field> Field::make(long q) {
  long p = 0, e = 0;
  if (!prime_power(q, &p, &e)) throw std::invalid_argument("Field: q = " + std::to_string(q) + " is not a prime power");
  if (e == 1) return std::shared_ptr<const Field>(new Field(p, 1, {0, 1}, 0));
  if (e == 2) return quadratic_extension(p);
  if (q == 8) return std::shared_ptr<const Field>(new Field(2, 3, {1, 1, 0, 1}, 0));
  throw std::invalid_argument("Field: GF(" + std::to_string(q) + ") is not supported");
}

std::shared_ptr<const Field> Field::quadratic_extension(long p) {
  if (!is_prime(p)) throw std::invalid_argument("Field: " + std::to_string(p) + " is not prime");
  if (p == 2) return std::shared_ptr<const Field>(new Field(2, 2, {1, 1, 1}, 0));
  long s = 2;
  auto residue = [p](long x) {
    for (long y = 1; y < p; ++y)
      if (y * y % p == x) return true;
    return false;
  };
  while (residue(s)) ++s;
  return std::shared_ptr<const Field>(new Field(p, 2, {(p - s) % p, 0, 1}, s));
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw std::domain_error("Field: inverse of 0");
  return inv_[a];
}

std::string Field::name() const {
  std::string s = "GF(" + std::to_string(q_) + ")";
  if (e_ > 1) s += " over GF(" + std::to_string(p_) + ")";
  return s;
}

}  // namespace rankdist
