#include "pel/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pel {

namespace {

boost::multiprecision::cpp_int parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  boost::multiprecision::cpp_int value = 0;
  for (; pos < text.size(); ++pos) {
    if (!std::isdigit(static_cast<unsigned char>(text[pos]))) {
      throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    }
    value = value * 10 + (text[pos] - '0');
  }
  return negative ? boost::multiprecision::cpp_int(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = parse_integer(trim(s.substr(0, slash)), text);
    const auto den = parse_integer(trim(s.substr(slash + 1)), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    }
    return Rational(num, den);
  }
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    bool negative = !int_part.empty() && int_part[0] == '-';
    if (!int_part.empty() && (int_part[0] == '-' || int_part[0] == '+')) int_part.remove_prefix(1);
    if (int_part.empty()) int_part = "0";
    if (frac_part.empty()) frac_part = "0";
    const auto whole = parse_integer(int_part, text);
    const auto frac = parse_integer(frac_part, text);
    if (whole < 0 || frac < 0) {
      throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    }
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    Rational value = Rational(whole) + Rational(frac, scale);
    return negative ? Rational(-value) : value;
  }
  return Rational(parse_integer(s, text));
}

std::string format_rational(const Rational& value) {
  const auto num = boost::multiprecision::numerator(value);
  const auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot convert non-finite double to rational");
  }
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // 53-bit mantissa scaled to an integer.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational result(scaled);
  boost::multiprecision::cpp_int power = 1;
  power <<= std::abs(exponent);
  if (exponent >= 0) {
    result *= Rational(power);
  } else {
    result /= Rational(power);
  }
  return result;
}

long double to_long_double(const Rational& value) {
  return value.convert_to<long double>();
}

}  // namespace pel
