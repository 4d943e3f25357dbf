#include "kgds/arith.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "kgds/error.hpp"

namespace kgds {

namespace {

using u128 = unsigned __int128;

void check_dim(int dim, int min_dim, const char* what) {
  if (dim < min_dim)
    throw ValidationError(std::string(what) + ": dimension must be at least " + std::to_string(min_dim) +
                          ", got " + std::to_string(dim));
}

void check_q(std::int64_t q, const char* what) {
  if (q < 1) throw ValidationError(std::string(what) + ": q must be positive, got " + std::to_string(q));
}

u128 checked_pow(u128 base, int exp) {
  u128 out = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<u128>::max() / base)
      throw ResourceLimitError("integer power " + std::to_string(static_cast<double>(base)) + "^" +
                               std::to_string(exp) + " overflows 128 bits");
    out *= base;
  }
  return out;
}

std::uint64_t to_u64(u128 v, const char* what) {
  if (v > std::numeric_limits<std::uint64_t>::max())
    throw ResourceLimitError(std::string(what) + ": count exceeds 64-bit range");
  return static_cast<std::uint64_t>(v);
}

BigInt to_big(u128 v) {
  BigInt hi(static_cast<unsigned long>(v >> 64));
  BigInt lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return (hi << 64) + lo;
}

Rational phi_over(const SieveTable& s, std::uint64_t d) {
  Rational r(static_cast<unsigned long>(s.phi(d)), static_cast<unsigned long>(d));
  r.canonicalize();
  return r;
}

Rational pow_rational(std::int64_t q, int e) {
  BigInt b;
  mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(e));
  return Rational(b);
}

// #{v != 0 : |v| <= t, gcd(v) = 1} for any dim >= 1, via Moebius over e <= t.
u128 primitive_ball_any(const SieveTable& s, int dim, std::int64_t t) {
  __int128 acc = 0;
  for (std::int64_t e = 1; e <= t; ++e) {
    const int m = s.mu(static_cast<std::uint64_t>(e));
    if (m == 0) continue;
    const auto cube = cube_cardinality(dim, t / e) - 1;
    acc += m > 0 ? static_cast<__int128>(cube) : -static_cast<__int128>(cube);
  }
  return static_cast<u128>(acc);
}

// #{v != 0 : |v| <= q, gcd(gcd(v), q) = d} for d | q.
u128 gcd_class_with_q(const SieveTable& s, int dim, std::int64_t q, std::int64_t d) {
  const std::int64_t rest = q / d;
  __int128 acc = 0;
  for (auto [f, m] : s.squarefree_divisors(static_cast<std::uint64_t>(rest))) {
    const auto cube = cube_cardinality(dim, rest / static_cast<std::int64_t>(f)) - 1;
    acc += m > 0 ? static_cast<__int128>(cube) : -static_cast<__int128>(cube);
  }
  return static_cast<u128>(acc);
}

}  // namespace

u128 cube_cardinality(int dim, std::int64_t t) { return checked_pow(static_cast<u128>(2 * t + 1), dim); }

u128 shell_cardinality(int dim, std::int64_t t) {
  if (t == 0) return 1;
  return cube_cardinality(dim, t) - checked_pow(static_cast<u128>(2 * t - 1), dim);
}

std::uint64_t count_primitive_ball(int dim, std::int64_t q) {
  check_dim(dim, 2, "count_primitive_ball");
  check_q(q, "count_primitive_ball");
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q));
  return to_u64(primitive_ball_any(*sieve, dim, q), "count_primitive_ball");
}

std::uint64_t count_coprime_shell(int dim, std::int64_t q) {
  check_dim(dim, 1, "count_coprime_shell");
  check_q(q, "count_coprime_shell");
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q));
  return to_u64(gcd_class_with_q(*sieve, dim, q, 1), "count_coprime_shell");
}

Rational sum_phi_gcd_ball(int dim, std::int64_t q, GcdMode mode) {
  check_dim(dim, 1, "sum_phi_gcd_ball");
  check_q(q, "sum_phi_gcd_ball");
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q));
  Rational total = 0;
  if (mode == GcdMode::kPlain) {
    // Vectors with gcd exactly d are d times primitive vectors of norm <= q/d.
    for (std::int64_t d = 1; d <= q; ++d) {
      const auto count = primitive_ball_any(*sieve, dim, q / d);
      if (count == 0) continue;
      total += phi_over(*sieve, static_cast<std::uint64_t>(d)) * Rational(to_big(count));
    }
  } else {
    for (auto d : sieve->divisors(static_cast<std::uint64_t>(q))) {
      const auto count = gcd_class_with_q(*sieve, dim, q, static_cast<std::int64_t>(d));
      if (count == 0) continue;
      total += phi_over(*sieve, d) * Rational(to_big(count));
    }
  }
  total.canonicalize();
  return total;
}

DirichletCheck dirichlet_identity_check(std::int64_t q) {
  check_q(q, "dirichlet_identity_check");
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q));
  const auto uq = static_cast<std::uint64_t>(q);
  DirichletCheck out;
  out.lhs = 0;
  for (auto d : sieve->divisors(uq)) {
    Rational term(static_cast<unsigned long>(sieve->phi(d)) * sieve->phi(uq / d), static_cast<unsigned long>(d));
    term.canonicalize();
    out.lhs += term;
  }
  out.lhs.canonicalize();
  out.rhs = Rational(static_cast<long>(q));
  for (auto [p, e] : sieve->factorize(uq)) {
    (void)e;
    Rational factor(static_cast<unsigned long>(p * p - 1), static_cast<unsigned long>(p * p));
    out.rhs *= factor;
  }
  out.rhs.canonicalize();
  return out;
}

Rational totient_average(std::int64_t n_max) {
  check_q(n_max, "totient_average");
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(n_max));
  Rational total = 0;
  for (std::int64_t n = 1; n <= n_max; ++n) total += phi_over(*sieve, static_cast<std::uint64_t>(n));
  total.canonicalize();
  return total;
}

std::vector<std::uint64_t> primitive_shell_counts(int dim, std::int64_t t_max) {
  check_dim(dim, 1, "primitive_shell_counts");
  if (t_max < 0) throw ValidationError("primitive_shell_counts: negative range");
  std::vector<__int128> acc(static_cast<std::size_t>(t_max) + 1, 0);
  if (t_max >= 1) {
    const auto sieve = shared_sieve(static_cast<std::uint64_t>(t_max));
    std::vector<__int128> shell(acc.size(), 0);
    for (std::int64_t t = 1; t <= t_max; ++t) shell[t] = static_cast<__int128>(shell_cardinality(dim, t));
    for (std::int64_t d = 1; d <= t_max; ++d) {
      const int m = sieve->mu(static_cast<std::uint64_t>(d));
      if (m == 0) continue;
      for (std::int64_t t = d, k = 1; t <= t_max; t += d, ++k) acc[t] += m * shell[k];
    }
  }
  std::vector<std::uint64_t> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = to_u64(static_cast<u128>(acc[i]), "primitive_shell_counts");
  return out;
}

// ---------------------------------------------------------------------------

void BoundReport::add(std::int64_t q, Rational exact, Rational comparator) {
  if (!values.empty() && q <= values.back().q)
    throw ConsistencyError("BoundReport rows must be strictly increasing in q");
  BoundRow row{q, std::move(exact), std::move(comparator), 0.0};
  if (sgn(row.comparator) != 0) row.ratio = to_double(Rational(row.exact / row.comparator));
  values.push_back(std::move(row));
}

void BoundReport::finalize() {
  threshold.reset();
  fitted_constant.reset();
  std::size_t start = values.size();
  while (start > 0 && values[start - 1].ratio > 0.0) --start;
  if (start == values.size()) return;
  threshold = values[start].q;
  double best = values[start].ratio;
  for (std::size_t i = start; i < values.size(); ++i) best = std::min(best, values[i].ratio);
  fitted_constant = best;
}

BoundReport primitive_ball_report(int dim, std::int64_t q_max, Budget& budget) {
  check_dim(dim, 2, "primitive_ball_report");
  check_q(q_max, "primitive_ball_report");
  BoundReport rep;
  rep.lemma = "primitive-ball";
  rep.params = {{"D", std::to_string(dim)}, {"q_max", std::to_string(q_max)}};
  rep.note = "comparator is (2q+1)^D; ratio tends to 1/zeta(D)";
  try {
    budget.charge(static_cast<std::uint64_t>(q_max) * 8, "primitive-ball shell table");
    const auto shells = primitive_shell_counts(dim, q_max);
    BigInt running = 0;
    for (std::int64_t q = 1; q <= q_max; ++q) {
      budget.charge(1, "primitive-ball");
      running += static_cast<unsigned long>(shells[q]);
      rep.add(q, Rational(running), Rational(to_big(cube_cardinality(dim, q))));
    }
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  return rep;
}

BoundReport coprime_shell_report(int dim, std::int64_t q_max, Budget& budget) {
  check_dim(dim, 1, "coprime_shell_report");
  check_q(q_max, "coprime_shell_report");
  BoundReport rep;
  rep.lemma = "coprime-shell";
  rep.params = {{"D", std::to_string(dim)}, {"q_max", std::to_string(q_max)}};
  rep.note = dim == 1 ? "comparator is phi(q)" : "comparator is q^D";
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q_max));
  try {
    for (std::int64_t q = 1; q <= q_max; ++q) {
      budget.charge(sieve->divisors(static_cast<std::uint64_t>(q)).size(), "coprime-shell");
      Rational value(to_big(gcd_class_with_q(*sieve, dim, q, 1)));
      Rational comp = dim == 1 ? Rational(static_cast<unsigned long>(sieve->phi(static_cast<std::uint64_t>(q))))
                               : pow_rational(q, dim);
      rep.add(q, std::move(value), std::move(comp));
    }
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  return rep;
}

BoundReport gcd_sum_report(int dim, std::int64_t q_max, GcdMode mode, Budget& budget) {
  check_dim(dim, 1, "gcd_sum_report");
  check_q(q_max, "gcd_sum_report");
  BoundReport rep;
  rep.lemma = "gcd-sum";
  rep.params = {{"D", std::to_string(dim)},
                {"q_max", std::to_string(q_max)},
                {"mode", mode == GcdMode::kPlain ? "plain" : "coprime_to_q"}};
  rep.note = "comparator is q^D";
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q_max));
  try {
    if (mode == GcdMode::kPlain) {
      // Shell-by-shell increments: the shell |v| = t splits into gcd classes d | t,
      // each in bijection with primitive vectors on the shell of norm t/d.
      budget.charge(static_cast<std::uint64_t>(q_max) * 8, "gcd-sum shell table");
      const auto prim = primitive_shell_counts(dim, q_max);
      Rational running = 0;
      for (std::int64_t t = 1; t <= q_max; ++t) {
        const auto divs = sieve->divisors(static_cast<std::uint64_t>(t));
        budget.charge(divs.size(), "gcd-sum");
        for (auto d : divs) {
          const auto count = prim[t / static_cast<std::int64_t>(d)];
          if (count == 0) continue;
          running += phi_over(*sieve, d) * Rational(static_cast<unsigned long>(count));
        }
        running.canonicalize();
        rep.add(t, running, pow_rational(t, dim));
      }
    } else {
      for (std::int64_t q = 1; q <= q_max; ++q) {
        budget.charge(sieve->divisors(static_cast<std::uint64_t>(q)).size() * 4, "gcd-sum");
        rep.add(q, sum_phi_gcd_ball(dim, q, mode), pow_rational(q, dim));
      }
    }
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  return rep;
}

std::vector<DirichletRow> dirichlet_table(std::int64_t q_max) {
  check_q(q_max, "dirichlet_table");
  std::vector<DirichletRow> out;
  out.reserve(static_cast<std::size_t>(q_max));
  for (std::int64_t q = 1; q <= q_max; ++q) {
    auto c = dirichlet_identity_check(q);
    out.push_back({q, std::move(c.lhs), std::move(c.rhs)});
  }
  return out;
}

}  // namespace kgds
