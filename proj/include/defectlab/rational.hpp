#pragma once

// Exact rational numbers used for exponents and value-group coordinates.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "defectlab/errors.hpp"

namespace defectlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational make_rational(const Integer& n, const Integer& d = 1) {
  if (d == 0) throw parse_error("zero denominator");
  return Rational(n, d);
}

/// Floor of a rational, as an integer.
inline Integer floor_div(const Rational& r) {
  Integer n = num(r), d = den(r);
  Integer q = n / d;
  if (n % d != 0 && n < 0) q -= 1;
  return q;
}

inline Integer ceil_div(const Rational& r) {
  Integer n = num(r), d = den(r);
  Integer q = n / d;
  if (n % d != 0 && n > 0) q += 1;
  return q;
}

inline Integer igcd(Integer a, Integer b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Integer t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline Integer ilcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  Integer g = igcd(a, b);
  Integer l = a / g * b;
  return l < 0 ? Integer(-l) : l;
}

/// Positive generator of the subgroup of Q generated by `gens` (gcd of numerators over lcm of denominators).
inline Rational rational_gcd(const std::vector<Rational>& gens) {
  Integer n = 0, d = 1;
  for (const auto& g : gens) d = ilcm(d, den(g));
  for (const auto& g : gens) n = igcd(n, num(g) * (d / den(g)));
  return Rational(n, d);
}

inline Rational rpow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

inline Integer ipow(const Integer& base, unsigned e) {
  Integer r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

inline std::string to_string(const Rational& r) {
  if (den(r) == 1) return num(r).str();
  return num(r).str() + "/" + den(r).str();
}

inline bool is_prime_number(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Parses "3", "-1/2", "+7/4". Whitespace around the literal is ignored.
inline Rational parse_rational(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw parse_error("empty rational literal");
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  auto digits = [&](std::size_t& pos) {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw parse_error("malformed rational literal '" + std::string(s) + "'");
    return Integer(std::string(s.substr(start, pos - start)));
  };
  Integer n = digits(i);
  Integer d = 1;
  if (i < s.size() && s[i] == '/') {
    ++i;
    d = digits(i);
  }
  if (i != s.size()) throw parse_error("trailing characters in rational literal '" + std::string(s) + "'");
  if (d == 0) throw parse_error("zero denominator in '" + std::string(s) + "'");
  return make_rational(neg ? Integer(-n) : n, d);
}

/// Prime factors of |n| (distinct, ascending). Trial division; inputs are desk-scale.
inline std::vector<Integer> prime_factors(Integer n) {
  std::vector<Integer> out;
  if (n < 0) n = -n;
  for (Integer d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace defectlab
