#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace cera {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// "p/q" in lowest terms; integers print without a denominator.
inline std::string to_string(const Rational& value) {
  const auto num = boost::multiprecision::numerator(value);
  const auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace cera
