#pragma once

#include <cstdint>
#include <vector>

#include "kgds/arith.hpp"
#include "kgds/budget.hpp"
#include "kgds/partition.hpp"
#include "kgds/rational.hpp"
#include "kgds/rng.hpp"
#include "kgds/sieve.hpp"

namespace kgds {

// ---------------------------------------------------------------------------
// Coprime residues in an interval
// ---------------------------------------------------------------------------

/// #{p in Z : gcd(p, q) = 1, alpha q <= p <= beta q} by scanning every p.
std::int64_t count_coprime_interval_scan(std::int64_t q, Frac alpha, Frac beta);

/// Same count as sum_{d|q} mu(q/d) theta(d), theta(d) = #{p : alpha d <= p <= beta d}.
std::int64_t count_coprime_interval_mobius(std::int64_t q, Frac alpha, Frac beta, const SieveTable& sieve);

/// Both routes; throws ConsistencyError if they disagree. Requires 0 <= alpha < beta <= 1.
std::int64_t count_coprime_interval(std::int64_t q, Frac alpha, Frac beta);

/// Scans q = 1..q_max over `trials` random placements [alpha, alpha + gamma] and
/// reports the smallest Q such that every count for q in [Q, q_max] lies in
/// [phi(q) gamma / 2, 3 phi(q) gamma / 2]. Rows carry the smallest count over
/// the placements against phi(q) gamma.
BoundReport niederreiter_threshold(Frac gamma, std::int64_t q_max, int trials, std::uint64_t seed,
                                   Budget& budget = unlimited_budget());

/// Random left endpoints in [0, 1 - gamma] with denominator 10^6, one per coordinate.
std::vector<Frac> random_placement(Frac gamma, int dim, Rng& rng);

// ---------------------------------------------------------------------------
// Primitive points in boxes
// ---------------------------------------------------------------------------

/// #{p in Z^d : gcd(p) = 1, alpha_i q <= p_i <= beta_i q}. Requires d >= 2.
std::uint64_t count_primitive_box(int dim, const Box& box);

BoundReport primitive_box_report(int dim, Frac gamma, std::int64_t q_max, int placements, std::uint64_t seed,
                                 Budget& budget = unlimited_budget());

// ---------------------------------------------------------------------------
// Partition-constrained shell sums
// ---------------------------------------------------------------------------

/// Histogram of the shell |q| = q restricted to Q(pi), keyed by the gcds of
/// the q-coordinates of each mixed part (in canonical part order).
struct ShellProfile {
  std::int64_t q = 0;
  std::vector<int> mixed_parts;  // indices into Partition::parts(), all < a()
  struct Class {
    std::vector<std::int64_t> gcds;
    std::uint64_t count;
  };
  std::vector<Class> classes;  // sorted by gcds
  std::uint64_t shell_vectors = 0;
  std::uint64_t in_Q = 0;
};

ShellProfile shell_profile(const Partition& pi, std::int64_t q, Budget& budget = unlimited_budget(),
                           unsigned threads = 1);

/// sum over |q| = q of #{p in P(pi, q) : alpha_i q <= p_i <= beta_i q}. The box
/// covers the m p-coordinates and its scale must equal q.
std::uint64_t counting_sum(const Partition& pi, std::int64_t q, const Box& box, Budget& budget = unlimited_budget(),
                           unsigned threads = 1);
std::uint64_t counting_sum(const Partition& pi, const ShellProfile& profile, const Box& box);

/// sum over |q| = q, q in Q(pi), of prod over parts with exactly one p-index of
/// phi(g)/g, g the gcd of the part's q-coordinates. A part whose q-coordinates
/// are all zero contributes the factor 0.
Rational funny_sum(const Partition& pi, std::int64_t q, Budget& budget = unlimited_budget(), unsigned threads = 1);
Rational funny_sum(const Partition& pi, const ShellProfile& profile);

/// Lower-bound comparator for the shell sums: q^(n-1) if has_ell, else q^(n-2) phi(q).
Rational funny_comparator(const Partition& pi, std::int64_t q);

BoundReport funny_report(const Partition& pi, std::int64_t q_max, Budget& budget = unlimited_budget(),
                         unsigned threads = 1);

/// Minimum over `placements` random boxes of width gamma of counting_sum, against
/// gamma^m q^(m+n-1) (has_ell) or gamma^m q^(m+n-2) phi(q).
BoundReport counting_report(const Partition& pi, Frac gamma, std::int64_t q_max, int placements, std::uint64_t seed,
                            Budget& budget = unlimited_budget(), unsigned threads = 1);

}  // namespace kgds
