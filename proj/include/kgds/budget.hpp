#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "kgds/error.hpp"

namespace kgds {

/// Counts inner-loop operations (gcds, membership tests) against a limit.
/// Charging is thread-safe; the consumed total is deterministic as long as
/// callers charge per unit of work rather than per unit of time.
class Budget {
 public:
  static constexpr std::uint64_t kDefaultLimit = 1'000'000'000ULL;

  explicit Budget(std::uint64_t limit = kDefaultLimit) : limit_(limit) {}

  Budget(const Budget& other) : limit_(other.limit_), used_(other.used()) {}
  Budget& operator=(const Budget& other) {
    limit_ = other.limit_;
    used_.store(other.used());
    return *this;
  }

  /// Throws ResourceLimitError if `ops` more operations would exceed the limit.
  /// `what` is used in the error message.
  void charge(std::uint64_t ops, const char* what = "operation");

  /// Throws without consuming if a planned workload would not fit.
  void require(std::uint64_t ops, const char* what = "operation") const;

  std::uint64_t limit() const { return limit_; }
  std::uint64_t used() const { return used_.load(std::memory_order_relaxed); }
  std::uint64_t remaining() const {
    const auto u = used();
    return u >= limit_ ? 0 : limit_ - u;
  }

 private:
  std::uint64_t limit_;
  std::atomic<std::uint64_t> used_{0};
};

/// Shared unlimited budget for callers that do not care.
Budget& unlimited_budget();

}  // namespace kgds
