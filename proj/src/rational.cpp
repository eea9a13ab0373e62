#include "kgres/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kgres {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(unsigned e) {
  cpp_int r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

// Decimal literal with optional fraction and exponent: [-+]digits[.digits][e[-+]digits]
Rational parse_decimal(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  cpp_int mantissa = 0;
  int scale = 0;
  bool digits = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    mantissa = mantissa * 10 + (s[i++] - '0');
    digits = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      mantissa = mantissa * 10 + (s[i++] - '0');
      --scale;
      digits = true;
    }
  }
  if (!digits) throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    int e = 0;
    bool edigits = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      e = e * 10 + (s[i++] - '0');
      edigits = true;
      if (e > 4000) throw std::invalid_argument("exponent too large: '" + std::string(s) + "'");
    }
    if (!edigits) throw std::invalid_argument("malformed exponent: '" + std::string(s) + "'");
    scale += eneg ? -e : e;
  }
  if (i != s.size()) throw std::invalid_argument("trailing characters in number: '" + std::string(s) + "'");
  Rational r = scale >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(scale)))
                          : Rational(mantissa, pow10(static_cast<unsigned>(-scale)));
  return negative ? Rational(-r) : r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("coefficient must be finite");
  if (value == 0.0) return Rational{0};
  int exp = 0;
  const double frac = std::frexp(value, &exp);
  // frac * 2^53 is an exact integer.
  const auto mant = static_cast<long long>(std::ldexp(frac, 53));
  exp -= 53;
  cpp_int num = mant;
  cpp_int den = 1;
  if (exp >= 0) {
    num <<= exp;
  } else {
    den <<= -exp;
  }
  return Rational(num, den);
}

Rational parse_rational(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(trim(text.substr(0, slash)));
  const Rational den = parse_decimal(trim(text.substr(slash + 1)));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::string to_string(const Rational& value) {
  const auto num = boost::multiprecision::numerator(value);
  const auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace kgres
