#include "rankdist/interval.hpp"

#include <stdexcept>

namespace rankdist {

Rational qpow(long q, long e) {
  if (e >= 0) return Rational(ipow(q, e));
  return Rational(Integer(1), ipow(q, -e));
}

Integer ipow(long q, long e) {
  if (e < 0) throw std::invalid_argument("ipow: negative exponent");
  Integer r;
  mpz_ui_pow_ui(r.backend().data(), static_cast<unsigned long>(q < 0 ? -q : q),
                static_cast<unsigned long>(e));
  if (q < 0 && (e % 2) == 1) r = -r;
  return r;
}

std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(text));
    return Rational(Integer(text.substr(0, slash)), Integer(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + text + "'");
  }
}

std::string to_string(const IntervalRat& x) {
  return "[" + to_string(x.lo()) + ", " + to_string(x.hi()) + "]";
}

IntervalRat round_outward(const IntervalRat& x, unsigned bits) {
  Integer scale = ipow(2, bits);
  auto floor_on_grid = [&](const Rational& v) {
    Rational s = v * scale;
    Integer f = numerator(s) / denominator(s);  // truncates toward zero
    if (Rational(f) > s) f -= 1;
    return Rational(f, scale);
  };
  auto ceil_on_grid = [&](const Rational& v) {
    Rational s = v * scale;
    Integer c = numerator(s) / denominator(s);
    if (Rational(c) < s) c += 1;
    return Rational(c, scale);
  };
  return IntervalRat(floor_on_grid(x.lo()), ceil_on_grid(x.hi()));
}

}  // namespace rankdist
