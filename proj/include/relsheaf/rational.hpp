#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "relsheaf/error.hpp"

namespace relsheaf {

// Exact rational scalar. cpp_rational keeps lowest terms with positive
// denominator, which is exactly the canonical form we need.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Parses "p" or "p/q" with integer p, q. No decimals, ever.
inline Rational rational_from_string(const std::string& s) {
  check(!s.empty(), errc::parse, "empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
    boost::multiprecision::cpp_int num(s.substr(0, slash));
    boost::multiprecision::cpp_int den(s.substr(slash + 1));
    check(den != 0, errc::parse, "zero denominator in '" + s + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    fail(errc::parse, "bad rational literal '" + s + "'");
  }
}

}  // namespace relsheaf
