#include "kgds/sieve.hpp"

#include <algorithm>
#include <mutex>
#include <string>

#include "kgds/error.hpp"

namespace kgds {

namespace {
constexpr std::uint64_t kMaxSieve = 1ULL << 31;
}

SieveTable::SieveTable(std::uint64_t limit) : limit_(limit) {
  if (limit == 0) throw ValidationError("sieve limit must be at least 1");
  if (limit > kMaxSieve) throw ValidationError("sieve limit " + std::to_string(limit) + " too large");
  const std::size_t n = static_cast<std::size_t>(limit) + 1;
  phi_.assign(n, 0);
  mu_.assign(n, 0);
  spf_.assign(n, 0);
  phi_[1] = 1;
  mu_[1] = 1;
  spf_[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      phi_[i] = static_cast<std::uint32_t>(i - 1);
      mu_[i] = -1;
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes_) {
      const std::uint64_t ip = i * p;
      if (p > spf_[i] || ip > limit) break;
      spf_[ip] = p;
      if (p == spf_[i]) {
        phi_[ip] = phi_[i] * p;
        mu_[ip] = 0;
      } else {
        phi_[ip] = phi_[i] * (p - 1);
        mu_[ip] = static_cast<std::int8_t>(-mu_[i]);
      }
    }
  }
}

std::size_t SieveTable::check(std::uint64_t n) const {
  if (n == 0 || n > limit_)
    throw ValidationError("argument " + std::to_string(n) + " outside sieve range 1.." + std::to_string(limit_));
  return static_cast<std::size_t>(n);
}

std::vector<std::pair<std::uint64_t, int>> SieveTable::factorize(std::uint64_t n) const {
  check(n);
  std::vector<std::pair<std::uint64_t, int>> out;
  while (n > 1) {
    const std::uint64_t p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  return out;
}

std::vector<std::uint64_t> SieveTable::divisors(std::uint64_t n) const {
  std::vector<std::uint64_t> out{1};
  for (auto [p, e] : factorize(n)) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::uint64_t, int>> SieveTable::squarefree_divisors(std::uint64_t n) const {
  std::vector<std::pair<std::uint64_t, int>> out{{1, 1}};
  for (auto [p, e] : factorize(n)) {
    (void)e;
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i) out.emplace_back(out[i].first * p, -out[i].second);
  }
  return out;
}

SieveTable build_sieve(std::uint64_t limit) { return SieveTable(limit); }

std::shared_ptr<const SieveTable> shared_sieve(std::uint64_t min_limit) {
  static std::mutex mu;
  static std::shared_ptr<const SieveTable> cached;
  std::lock_guard lock(mu);
  if (!cached || cached->limit() < min_limit) {
    std::uint64_t target = std::max<std::uint64_t>(min_limit, 1024);
    if (cached) target = std::max(target, std::min(cached->limit() * 2, kMaxSieve));
    cached = std::make_shared<const SieveTable>(target);
  }
  return cached;
}

}  // namespace kgds
