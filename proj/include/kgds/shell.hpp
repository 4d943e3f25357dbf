#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <vector>

#include "kgds/rng.hpp"

namespace kgds {

/// |v| = max |v_i|
inline std::int64_t max_norm(std::span<const std::int64_t> v) {
  std::int64_t m = 0;
  for (auto x : v) m = std::max(m, x < 0 ? -x : x);
  return m;
}

/// gcd of absolute values; 0 for the empty or all-zero vector.
inline std::int64_t gcd_abs(std::span<const std::int64_t> v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

/// Number of v in Z^n with |v| = q (q >= 1). Saturates at UINT64_MAX.
std::uint64_t shell_size(int n, std::int64_t q);

/// The shell |v| = q splits into 2n disjoint faces, one per (i, sign):
/// v_i = sign * q, |v_j| < q for j < i, |v_j| <= q for j > i.
inline int shell_face_count(int n) { return 2 * n; }
std::uint64_t shell_face_size(int n, std::int64_t q, int face);

/// Calls f(std::span<const std::int64_t>) for every vector of one face.
template <class F>
void for_each_in_face(int n, std::int64_t q, int face, F&& f) {
  const int axis = face / 2;
  const std::int64_t sign = (face % 2 == 0) ? 1 : -1;
  std::vector<std::int64_t> v(static_cast<std::size_t>(n));
  std::vector<std::int64_t> lo(v.size()), hi(v.size());
  for (int j = 0; j < n; ++j) {
    if (j == axis) {
      lo[j] = hi[j] = sign * q;
    } else if (j < axis) {
      lo[j] = -q + 1;
      hi[j] = q - 1;
    } else {
      lo[j] = -q;
      hi[j] = q;
    }
    v[j] = lo[j];
  }
  for (int j = 0; j < n; ++j)
    if (lo[j] > hi[j]) return;
  for (;;) {
    f(std::span<const std::int64_t>(v));
    int j = n - 1;
    while (j >= 0 && v[j] == hi[j]) {
      v[j] = lo[j];
      --j;
    }
    if (j < 0) return;
    ++v[j];
  }
}

/// Every v in Z^n with |v| = q, each exactly once.
template <class F>
void for_each_shell_vector(int n, std::int64_t q, F&& f) {
  for (int face = 0; face < shell_face_count(n); ++face) for_each_in_face(n, q, face, f);
}

/// Uniform sample from the shell |v| = q.
void sample_shell_vector(int n, std::int64_t q, Rng& rng, std::span<std::int64_t> out);

/// gcd lookup for arguments in [0, limit]; gcd(0, 0) = 0.
class GcdTable {
 public:
  explicit GcdTable(std::int64_t limit);
  std::int64_t limit() const { return limit_; }
  std::int64_t operator()(std::int64_t a, std::int64_t b) const {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    if (a <= limit_ && b <= limit_) return table_[static_cast<std::size_t>(a * (limit_ + 1) + b)];
    return std::gcd(a, b);
  }

 private:
  std::int64_t limit_;
  std::vector<std::uint16_t> table_;
};

}  // namespace kgds
