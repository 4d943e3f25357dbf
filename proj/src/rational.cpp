#include "kgds/rational.hpp"

#include <charconv>
#include <numeric>

#include "kgds/error.hpp"

namespace kgds {

std::string to_string(const Rational& r) { return r.get_str(); }

double to_double(const Rational& r) { return r.get_d(); }

namespace {

using i128 = __int128;

std::int64_t floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return static_cast<std::int64_t>(q);
}

std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw ValidationError("rational component overflows 64 bits");
  return static_cast<std::int64_t>(v);
}

Frac make(i128 n, i128 d) {
  if (d == 0) throw ValidationError("zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 a = n < 0 ? -n : n;
  i128 b = d;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Frac(narrow(n), narrow(d));
}

}  // namespace

Frac::Frac(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) throw ValidationError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::int64_t Frac::floor_mul(std::int64_t q) const {
  return floor_div(static_cast<i128>(num) * q, den);
}

std::int64_t Frac::ceil_mul(std::int64_t q) const {
  return -floor_div(-static_cast<i128>(num) * q, den);
}

bool operator<(const Frac& a, const Frac& b) {
  return static_cast<i128>(a.num) * b.den < static_cast<i128>(b.num) * a.den;
}

Frac operator+(const Frac& a, const Frac& b) {
  return make(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den,
              static_cast<i128>(a.den) * b.den);
}

Frac operator-(const Frac& a, const Frac& b) {
  return make(static_cast<i128>(a.num) * b.den - static_cast<i128>(b.num) * a.den,
              static_cast<i128>(a.den) * b.den);
}

Frac parse_frac(std::string_view text) {
  auto fail = [&] { return ValidationError("cannot parse rational '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();

  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw fail();
    return v;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto d = parse_int(text.substr(slash + 1));
    if (d == 0) throw fail();
    return Frac(parse_int(text.substr(0, slash)), d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = false;
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
      negative = whole[0] == '-';
      whole.remove_prefix(1);
    }
    if (frac.size() > 17 || (whole.empty() && frac.empty())) throw fail();
    for (char c : frac)
      if (c < '0' || c > '9') throw fail();
    i128 den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    i128 num = (whole.empty() ? 0 : parse_int(whole)) * den + (frac.empty() ? 0 : parse_int(frac));
    return make(negative ? -num : num, den);
  }
  return Frac(parse_int(text), 1);
}

std::string to_string(const Frac& f) {
  if (f.den == 1) return std::to_string(f.num);
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

}  // namespace kgds
