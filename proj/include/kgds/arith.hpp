#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgds/budget.hpp"
#include "kgds/rational.hpp"
#include "kgds/sieve.hpp"

namespace kgds {

// Conventions for every sum over Z^D in this header: the zero vector is
// excluded, gcd is taken over absolute values, and |v| is the max-norm.

/// #{v in Z^D \ {0} : |v| <= q, gcd(v) = 1}. Requires D >= 2.
std::uint64_t count_primitive_ball(int dim, std::int64_t q);

/// #{v in Z^D \ {0} : |v| <= q, gcd(gcd(v), q) = 1}. Equals 2 phi(q) for D = 1.
std::uint64_t count_coprime_shell(int dim, std::int64_t q);

enum class GcdMode { kPlain, kCoprimeToQ };

/// Exact value of sum over v in Z^D \ {0}, |v| <= q, of phi(g)/g with
/// g = gcd(v) (plain) or g = gcd(gcd(v), q) (coprime_to_q).
Rational sum_phi_gcd_ball(int dim, std::int64_t q, GcdMode mode);

struct DirichletCheck {
  Rational lhs;  // sum_{d|q} phi(d) phi(q/d) / d
  Rational rhs;  // q prod_{p|q} (1 - p^-2)
};

DirichletCheck dirichlet_identity_check(std::int64_t q);

/// sum_{n <= N} phi(n)/n, exact.
Rational totient_average(std::int64_t n_max);

/// Number of primitive vectors on the shell |v| = t in Z^dim, for every t in 0..t_max.
/// Entry 0 is 0. Uses prim_shell(t) = sum_{d|t} mu(d) shell(t/d).
std::vector<std::uint64_t> primitive_shell_counts(int dim, std::int64_t t_max);

/// (2t+1)^dim - (2t-1)^dim for t >= 1, 1 for t = 0, with overflow checks.
unsigned __int128 shell_cardinality(int dim, std::int64_t t);
/// (2t+1)^dim with overflow check (throws ResourceLimitError).
unsigned __int128 cube_cardinality(int dim, std::int64_t t);

// ---------------------------------------------------------------------------
// Bound reports
// ---------------------------------------------------------------------------

struct BoundRow {
  std::int64_t q = 0;
  Rational exact;
  Rational comparator;
  double ratio = 0.0;  // exact / comparator; 0 when comparator is 0
};

/// Table of an exact quantity against the growth rate a lemma asserts.
///
/// `threshold` is the smallest q0 such that every row with q >= q0 has a
/// positive ratio; `fitted_constant` is the minimum ratio over those rows.
/// Both are empirical and say nothing about the true constants.
struct BoundReport {
  std::string lemma;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<BoundRow> values;
  std::optional<double> fitted_constant;
  std::optional<std::int64_t> threshold;
  bool truncated = false;
  std::string note;

  void add(std::int64_t q, Rational exact, Rational comparator);
  /// Recomputes threshold and fitted constant from `values`.
  void finalize();
};

BoundReport primitive_ball_report(int dim, std::int64_t q_max, Budget& budget = unlimited_budget());
BoundReport coprime_shell_report(int dim, std::int64_t q_max, Budget& budget = unlimited_budget());
BoundReport gcd_sum_report(int dim, std::int64_t q_max, GcdMode mode, Budget& budget = unlimited_budget());

struct DirichletRow {
  std::int64_t q;
  Rational lhs;
  Rational rhs;
};
std::vector<DirichletRow> dirichlet_table(std::int64_t q_max);

}  // namespace kgds
