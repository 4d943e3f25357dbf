#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace kgds {

/// Euler totient, Moebius function and smallest prime factor for 1..limit,
/// filled by a linear sieve. Immutable after construction and safe to share
/// between threads.
class SieveTable {
 public:
  explicit SieveTable(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }

  std::uint32_t phi(std::uint64_t n) const { return phi_[check(n)]; }
  int mu(std::uint64_t n) const { return mu_[check(n)]; }
  std::uint32_t smallest_prime_factor(std::uint64_t n) const { return spf_[check(n)]; }

  /// Prime factorization as (prime, exponent), primes ascending.
  std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) const;
  /// All positive divisors of n, ascending.
  std::vector<std::uint64_t> divisors(std::uint64_t n) const;
  /// Squarefree divisors of n paired with mu(d); the only terms a Moebius sum needs.
  std::vector<std::pair<std::uint64_t, int>> squarefree_divisors(std::uint64_t n) const;

  std::span<const std::uint32_t> phi_table() const { return phi_; }
  std::span<const std::int8_t> mu_table() const { return mu_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

 private:
  std::size_t check(std::uint64_t n) const;

  std::uint64_t limit_;
  std::vector<std::uint32_t> phi_;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

/// Throws ValidationError when limit == 0.
SieveTable build_sieve(std::uint64_t limit);

/// Process-wide cached table covering at least 1..min_limit. Grows geometrically.
std::shared_ptr<const SieveTable> shared_sieve(std::uint64_t min_limit);

}  // namespace kgds
