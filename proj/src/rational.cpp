#include "nilkit/rational.hpp"

#include "nilkit/errors.hpp"


#include <cctype>

namespace nilkit {

namespace {

Integer parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw ParseError("malformed rational '" + std::string(whole) + "'");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("malformed rational '" + std::string(whole) + "'");
  }
  return Integer(std::string(digits));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(s.substr(0, slash), text);
    Integer q = parse_integer(s.substr(slash + 1), text);
    if (q == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    out = Rational(p) / Rational(q);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw ParseError("malformed rational '" + std::string(text) + "'");
    Integer whole = ip.empty() ? Integer(0) : parse_integer(ip, text);
    Integer frac = fp.empty() ? Integer(0) : parse_integer(fp, text);
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(fp.size()));
    out = Rational(whole) + Rational(frac) / Rational(scale);
  } else {
    out = Rational(parse_integer(s, text));
  }
  return negative ? Rational(-out) : out;
}

std::string format_rational(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

Integer height(const Rational& q) {
  Integer p = boost::multiprecision::abs(numerator(q));
  Integer d = denominator(q);
  return p > d ? p : d;
}

Integer height(const VecQ& v) {
  Integer h = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Integer hi = height(v(i));
    if (hi > h) h = hi;
  }
  return h;
}

Integer floor_int(const Rational& q) {
  Integer p = numerator(q);
  Integer d = denominator(q);
  Integer quot = p / d;  // truncates toward zero
  if (p < 0 && quot * d != p) quot -= 1;
  return quot;
}

Integer ceil_int(const Rational& q) { return -floor_int(Rational(-q)); }

VecD to_double(const VecQ& v) {
  VecD out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).convert_to<double>();
  return out;
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot convert non-finite value to a rational");
  return Rational(x);
}

Integer lcm_denominators(const VecQ& v) {
  Integer l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Integer d = denominator(v(i));
    l = l / boost::multiprecision::gcd(l, d) * d;
  }
  return l;
}

}  // namespace nilkit
