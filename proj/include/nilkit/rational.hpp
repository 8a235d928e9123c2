#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>

namespace nilkit {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecQ = Vec<Rational>;
using MatQ = Mat<Rational>;
using VecD = Vec<double>;

/// Parses "p", "p/q", or a finite decimal such as "-0.2503" into a reduced rational.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" when the denominator is one, otherwise "p/q".
std::string format_rational(const Rational& q);

/// max(|p|, |q|) of the reduced fraction.
Integer height(const Rational& q);
Integer height(const VecQ& v);

Integer floor_int(const Rational& q);
Integer ceil_int(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

VecD to_double(const VecQ& v);

/// Exact conversion of a binary64 value to a rational.
Rational from_double(double x);

template <typename Scalar>
Scalar scalar_from_rational(const Rational& q) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return q;
  } else if constexpr (std::is_same_v<Scalar, double>) {
    return q.convert_to<double>();
  } else {
    return Scalar(q);
  }
}

/// Floor of a scalar as an exact integer-valued scalar of the same type.
inline Rational floor_scalar(const Rational& q) { return Rational(floor_int(q)); }
inline double floor_scalar(double x) { return std::floor(x); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }
inline bool is_zero(const Rational& q) { return q.is_zero(); }
inline bool is_zero(double x) { return x == 0.0; }

Integer lcm_denominators(const VecQ& v);

}  // namespace nilkit
