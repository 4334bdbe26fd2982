#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <concepts>
#include <cstdio>
#include <regex>
#include <string>

#include "errors.hpp"

namespace hologossip {

/// Exact arbitrary-precision rational; always kept in lowest terms with a
/// positive denominator.
using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* kind = "float";

  static double to_double(double v) { return v; }

  /// Round-trip representation (17 significant digits).
  static std::string to_string(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* kind = "rational";

  static double to_double(const Rational& v) { return v.convert_to<double>(); }

  static std::string to_string(const Rational& v) { return v.str(); }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar T>
double to_double(const T& v) {
  return ScalarTraits<T>::to_double(v);
}

template <Scalar T>
std::string to_string(const T& v) {
  return ScalarTraits<T>::to_string(v);
}

/// Decimal rendering with `digits` significant digits, for either kind.
template <Scalar T>
std::string to_decimal(const T& v, int digits = 15) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, to_double(v));
  return buf;
}

/// Converts between scalar kinds. Double -> Rational is exact (binary value).
template <Scalar To, Scalar From>
To scalar_cast(const From& v) {
  if constexpr (std::same_as<To, From>) {
    return v;
  } else if constexpr (std::same_as<To, double>) {
    return to_double(v);
  } else {
    return Rational(v);
  }
}

/// |v - 1| <= eta * 1 for floats, v == 1 for rationals.
template <Scalar T>
bool is_unit(const T& v, double eta) {
  if constexpr (ScalarTraits<T>::exact) {
    return v == 1;
  } else {
    return std::abs(v - 1.0) <= eta;
  }
}

/// |a - b| <= tol for floats, a == b for rationals.
template <Scalar T>
bool near_equal(const T& a, const T& b, double tol) {
  if constexpr (ScalarTraits<T>::exact) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol;
  }
}

/// Parses "p/q", an integer, or a plain decimal ("0.25", "1e-3") into an
/// exact rational. Decimals are read exactly in base ten.
namespace detail {

// cpp_int reads a leading 0 as an octal prefix, so feed it plain digits only.
inline boost::multiprecision::cpp_int decimal_integer(const std::string& text) {
  std::string sign, digits = text;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
    if (digits[0] == '-') sign = "-";
    digits.erase(0, 1);
  }
  auto first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  return boost::multiprecision::cpp_int(sign + digits);
}

}  // namespace detail

inline Rational parse_rational(const std::string& text) {
  static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*)");
  static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, m, fraction)) {
    boost::multiprecision::cpp_int num = detail::decimal_integer(m[1].str());
    boost::multiprecision::cpp_int den = detail::decimal_integer(m[2].str());
    if (den == 0) throw Error(Errc::parse_error, "zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  if (std::regex_match(text, m, decimal) && (m[2].length() + m[3].length()) > 0) {
    std::string digits = m[2].str() + m[3].str();
    long exponent = m[4].matched ? std::stol(m[4].str()) : 0;
    exponent -= static_cast<long>(m[3].length());
    boost::multiprecision::cpp_int num = detail::decimal_integer(digits);
    if (m[1].str() == "-") num = -num;
    boost::multiprecision::cpp_int scale = boost::multiprecision::pow(
        boost::multiprecision::cpp_int(10), static_cast<unsigned>(std::abs(exponent)));
    return exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  }
  throw Error(Errc::parse_error, "not a number or p/q fraction: '" + text + "'");
}

}  // namespace hologossip
