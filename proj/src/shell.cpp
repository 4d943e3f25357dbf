#include "kgds/shell.hpp"

#include <limits>
#include <string>

#include "kgds/error.hpp"

namespace kgds {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t sat_pow(std::uint64_t base, int e) {
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) out = sat_mul(out, base);
  return out;
}

}  // namespace

std::uint64_t shell_face_size(int n, std::int64_t q, int face) {
  const int axis = face / 2;
  const auto inner = static_cast<std::uint64_t>(2 * q - 1);
  const auto outer = static_cast<std::uint64_t>(2 * q + 1);
  return sat_mul(sat_pow(inner, axis), sat_pow(outer, n - 1 - axis));
}

std::uint64_t shell_size(int n, std::int64_t q) {
  if (q < 1) throw ValidationError("shell index must be positive, got " + std::to_string(q));
  std::uint64_t total = 0;
  for (int face = 0; face < shell_face_count(n); ++face) {
    const auto s = shell_face_size(n, q, face);
    total = (total > std::numeric_limits<std::uint64_t>::max() - s) ? std::numeric_limits<std::uint64_t>::max()
                                                                      : total + s;
  }
  return total;
}

void sample_shell_vector(int n, std::int64_t q, Rng& rng, std::span<std::int64_t> out) {
  if (q < 1) throw ValidationError("shell index must be positive");
  const auto total = shell_size(n, q);
  if (total == std::numeric_limits<std::uint64_t>::max()) throw ResourceLimitError("shell too large to sample");
  std::uint64_t pick = rng.below(total);
  int face = 0;
  for (; face < shell_face_count(n); ++face) {
    const auto s = shell_face_size(n, q, face);
    if (pick < s) break;
    pick -= s;
  }
  const int axis = face / 2;
  for (int j = 0; j < n; ++j) {
    if (j == axis) {
      out[j] = (face % 2 == 0) ? q : -q;
    } else if (j < axis) {
      out[j] = rng.between(-q + 1, q - 1);
    } else {
      out[j] = rng.between(-q, q);
    }
  }
}

GcdTable::GcdTable(std::int64_t limit) : limit_(limit) {
  if (limit < 0 || limit > 4096) throw ValidationError("GcdTable limit out of range");
  const auto w = static_cast<std::size_t>(limit + 1);
  table_.assign(w * w, 0);
  for (std::size_t a = 0; a < w; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      const auto g = static_cast<std::uint16_t>(b == 0 ? a : table_[b * w + a % b]);
      table_[a * w + b] = g;
      table_[b * w + a] = g;
    }
}

}  // namespace kgds
