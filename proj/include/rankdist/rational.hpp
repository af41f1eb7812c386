#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace rankdist {

namespace bmp = boost::multiprecision;

/// Arbitrary-precision integer. Expression templates are off so values
/// compose cleanly with Eigen.
using Integer = bmp::number<bmp::gmp_int, bmp::et_off>;

/// Arbitrary-precision rational, always kept in lowest terms.
using Rational = bmp::number<bmp::gmp_rational, bmp::et_off>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// q^e for any integer exponent (negative exponents give 1/q^{|e|}).
Rational qpow(long q, long e);

/// Integer power q^e with e >= 0.
Integer ipow(long q, long e);

inline Rational ratio(long num, long den) { return Rational(num, den); }

/// "num/den" with both parts in decimal; integers are written "num/1".
std::string to_string(const Rational& r);

/// Parses "num/den" or a bare integer.
Rational parse_rational(const std::string& text);

/// Closest double, for display and Monte-Carlo comparisons only.
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace rankdist
