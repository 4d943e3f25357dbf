#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace kgds {

/// Exact arbitrary-width rational used for every value-bearing sum.
using Rational = mpq_class;
using BigInt = mpz_class;

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Small exact rational for interval endpoints (alpha, beta, gamma).
/// Always normalized: den > 0 and gcd(|num|, den) == 1.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Frac() = default;
  Frac(std::int64_t n, std::int64_t d);

  /// floor(num * q / den)
  std::int64_t floor_mul(std::int64_t q) const;
  /// ceil(num * q / den)
  std::int64_t ceil_mul(std::int64_t q) const;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational exact() const { return Rational(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den))); }

  friend bool operator==(const Frac& a, const Frac& b) = default;
  friend bool operator<(const Frac& a, const Frac& b);
  friend bool operator<=(const Frac& a, const Frac& b) { return !(b < a); }
  friend Frac operator+(const Frac& a, const Frac& b);
  friend Frac operator-(const Frac& a, const Frac& b);
};

/// Parses "3", "1/5", "0.125" or "-2/7" into an exact Frac.
/// Decimals are read exactly in base ten. Throws ValidationError.
Frac parse_frac(std::string_view text);

std::string to_string(const Frac& f);

}  // namespace kgds
