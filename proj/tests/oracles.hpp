#pragma once

// Brute-force reference computations. Deliberately naive: no sieves, no
// Moebius sums, nothing shared with the library beyond plain value types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using Vec = std::vector<std::int64_t>;

inline std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

inline std::int64_t gcd_all(const Vec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, iabs(x));
  return g;
}

inline std::int64_t norm(const Vec& v) {
  std::int64_t m = 0;
  for (auto x : v) m = std::max(m, iabs(x));
  return m;
}

inline std::int64_t phi(std::int64_t n) {
  std::int64_t c = 0;
  for (std::int64_t k = 1; k <= n; ++k) c += std::gcd(k, n) == 1;
  return c;
}

inline int mu(std::int64_t n) {
  int sign = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  return n > 1 ? -sign : sign;
}

/// Every v in [-r, r]^d, in odometer order.
inline void for_each_cube(int d, std::int64_t r, const std::function<void(const Vec&)>& f) {
  Vec v(static_cast<std::size_t>(d), -r);
  for (;;) {
    f(v);
    int j = d - 1;
    while (j >= 0 && v[j] == r) v[j--] = -r;
    if (j < 0) return;
    ++v[j];
  }
}

inline void for_each_shell(int d, std::int64_t q, const std::function<void(const Vec&)>& f) {
  for_each_cube(d, q, [&](const Vec& v) {
    if (norm(v) == q) f(v);
  });
}

inline std::uint64_t primitive_ball(int d, std::int64_t q) {
  std::uint64_t c = 0;
  for_each_cube(d, q, [&](const Vec& v) { c += gcd_all(v) == 1; });
  return c;
}

inline std::uint64_t coprime_shell(int d, std::int64_t q) {
  std::uint64_t c = 0;
  for_each_cube(d, q, [&](const Vec& v) {
    const auto g = gcd_all(v);
    c += g != 0 && std::gcd(g, q) == 1;
  });
  return c;
}

/// Double-precision sum; callers compare with a tolerance.
inline double phi_gcd_ball(int d, std::int64_t q, bool coprime_to_q) {
  double s = 0;
  for_each_cube(d, q, [&](const Vec& v) {
    auto g = gcd_all(v);
    if (g == 0) return;
    if (coprime_to_q) g = std::gcd(g, q);
    s += static_cast<double>(phi(g)) / static_cast<double>(g);
  });
  return s;
}

/// #{p : gcd(p, q) = 1, a q / b <= p <= c q / d} by scanning.
inline std::int64_t coprime_interval(std::int64_t q, std::int64_t an, std::int64_t ad, std::int64_t bn,
                                     std::int64_t bd) {
  std::int64_t c = 0;
  for (std::int64_t p = 0; p <= q; ++p)
    if (p * ad >= an * q && p * bd <= bn * q && std::gcd(p, q) == 1) ++c;
  return c;
}

/// (p, q) satisfies the coprimality of every part; parts are 1-based over
/// p_1..p_m, q_1..q_n.
inline bool in_parts(const std::vector<std::vector<int>>& parts, int m, const Vec& p, const Vec& q) {
  for (const auto& part : parts) {
    std::int64_t g = 0;
    for (int idx : part) g = std::gcd(g, iabs(idx <= m ? p[idx - 1] : q[idx - m - 1]));
    if (g != 1) return false;
  }
  return true;
}

/// Some p with 0 <= p_i <= max(|q|, 1) completes q.
inline bool fibre_nonempty(const std::vector<std::vector<int>>& parts, int m, const Vec& q) {
  bool found = false;
  const auto r = std::max<std::int64_t>(norm(q), 1);
  Vec p(static_cast<std::size_t>(m), 0);
  std::function<void(int)> rec = [&](int i) {
    if (found) return;
    if (i == m) {
      found = in_parts(parts, m, p, q);
      return;
    }
    for (std::int64_t v = 0; v <= r && !found; ++v) {
      p[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return found;
}

/// sum over |q| = shell of #{p in box : (p, q) in P(pi)}, box = [lo_i, hi_i].
inline std::uint64_t counting_sum(const std::vector<std::vector<int>>& parts, int m, int n, std::int64_t shell,
                                  const Vec& lo, const Vec& hi) {
  std::uint64_t total = 0;
  for_each_shell(n, shell, [&](const Vec& q) {
    Vec p(lo);
    std::function<void(int)> rec = [&](int i) {
      if (i == m) {
        total += in_parts(parts, m, p, q);
        return;
      }
      for (std::int64_t v = lo[i]; v <= hi[i]; ++v) {
        p[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
  });
  return total;
}

/// sum over |q| = shell with a nonempty fibre of prod over parts with one
/// p-index of phi(g)/g, g the gcd of the part's q entries (0 gives 0).
inline double funny_sum(const std::vector<std::vector<int>>& parts, int m, int n, std::int64_t shell) {
  double total = 0;
  for_each_shell(n, shell, [&](const Vec& q) {
    if (!fibre_nonempty(parts, m, q)) return;
    double prod = 1;
    for (const auto& part : parts) {
      int pcount = 0;
      std::int64_t g = 0;
      for (int idx : part) {
        if (idx <= m)
          ++pcount;
        else
          g = std::gcd(g, iabs(q[idx - m - 1]));
      }
      if (pcount != 1) continue;
      prod *= g == 0 ? 0.0 : static_cast<double>(phi(g)) / static_cast<double>(g);
    }
    total += prod;
  });
  return total;
}

/// Exact |{x in [a, b] : q x + p in [y - r, y + r] for some p}| for m = n = 1.
inline double slab_measure(std::int64_t q, double y, double r, double a, double b) {
  if (r >= 0.5) return b - a;
  const double aq = static_cast<double>(iabs(q));
  // a union of intervals of length 2r/|q| centred at (k +- y)/|q|
  const double ys = q < 0 ? -y : y;
  double total = 0;
  const auto k_lo = static_cast<std::int64_t>(std::floor(aq * a - ys - 1));
  const auto k_hi = static_cast<std::int64_t>(std::ceil(aq * b - ys + 1));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const double c = (static_cast<double>(k) + ys) / aq;
    const double lo = std::max(a, c - r / aq), hi = std::min(b, c + r / aq);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

/// sum over 0 < |q| <= Q in Z^n of (phi(g) psi(|q|) / g)^m.
inline double series_ds(int m, int n, std::int64_t Q, const std::function<double(std::int64_t)>& psi) {
  double s = 0;
  for_each_cube(n, Q, [&](const Vec& q) {
    const auto g = gcd_all(q);
    if (g == 0) return;
    const double t = static_cast<double>(phi(g)) * psi(norm(q)) / static_cast<double>(g);
    s += std::pow(t, m);
  });
  return s;
}

enum class Constraint { kNone, kParts, kCoprime };

/// Distinct (p, q) with 0 < |q| <= Q and |(q x)_i - p_i - y_i| < psi(|q|) for
/// every i. x is row-major n x m.
inline std::uint64_t dichotomy_hits(int m, int n, const std::vector<double>& x, const std::vector<double>& y,
                                    std::int64_t Q, const std::function<double(std::int64_t)>& psi,
                                    Constraint constraint, const std::vector<std::vector<int>>& parts = {}) {
  std::uint64_t hits = 0;
  for_each_cube(n, Q, [&](const Vec& q) {
    const auto t = norm(q);
    if (t == 0) return;
    const double r = psi(t);
    if (r <= 0) return;
    std::vector<std::vector<std::int64_t>> options(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      double v = -y[i];
      for (int j = 0; j < n; ++j) v += static_cast<double>(q[j]) * x[static_cast<std::size_t>(j * m + i)];
      for (auto p = static_cast<std::int64_t>(std::floor(v - r)) - 1; p <= static_cast<std::int64_t>(v + r) + 1;
           ++p)
        if (std::abs(v - static_cast<double>(p)) < r) options[i].push_back(p);
    }
    Vec p(static_cast<std::size_t>(m));
    std::function<void(int)> rec = [&](int i) {
      if (i == m) {
        bool ok = true;
        if (constraint == Constraint::kParts) ok = in_parts(parts, m, p, q);
        if (constraint == Constraint::kCoprime) {
          const auto g = gcd_all(q);
          for (int k = 0; k < m && ok; ++k) ok = std::gcd(iabs(p[k]), g) == 1;
        }
        hits += ok;
        return;
      }
      for (auto v : options[i]) {
        p[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
  });
  return hits;
}

}  // namespace oracle
