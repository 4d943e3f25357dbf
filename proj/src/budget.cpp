#include "kgds/budget.hpp"

#include <limits>

namespace kgds {

void Budget::require(std::uint64_t ops, const char* what) const {
  if (ops > remaining()) {
    throw ResourceLimitError(std::string(what) + ": needs " + std::to_string(ops) +
                             " operations but only " + std::to_string(remaining()) +
                             " of the budget (" + std::to_string(limit_) +
                             ") remain; use a smaller q or raise --budget");
  }
}

void Budget::charge(std::uint64_t ops, const char* what) {
  const auto before = used_.fetch_add(ops, std::memory_order_relaxed);
  if (before + ops > limit_ || before + ops < before) {
    throw ResourceLimitError(std::string(what) + ": operation budget of " +
                             std::to_string(limit_) +
                             " exhausted; use a smaller q or raise --budget");
  }
}

Budget& unlimited_budget() {
  static Budget b(std::numeric_limits<std::uint64_t>::max());
  return b;
}

}  // namespace kgds
