#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgds/rational.hpp"

namespace kgds {

/// m linear forms in n variables: p lives in Z^m, q in Z^n.
struct Dims {
  int m = 1;
  int n = 1;

  Dims() = default;
  Dims(int m_, int n_);  // throws ValidationError unless m, n >= 1
  int total() const { return m + n; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// A partition of {1, ..., m+n} into parts of size >= 2.
///
/// Parts are kept in the canonical order: mixed parts (meeting both the
/// p-indices 1..m and the q-indices m+1..m+n) first, then parts inside 1..m,
/// then parts inside m+1..m+n. Within a group parts are sorted by their
/// smallest index; indices within a part ascend.
class Partition {
 public:
  struct Part {
    std::vector<int> indices;   // 1-based, ascending
    std::vector<int> p_coords;  // 0-based positions in p
    std::vector<int> q_coords;  // 0-based positions in q
  };

  /// Validates and canonicalizes; throws ValidationError naming the offending part.
  Partition(Dims dims, std::vector<std::vector<int>> parts);

  static Partition trivial(Dims dims);

  const Dims& dims() const { return dims_; }
  const std::vector<Part>& parts() const { return parts_; }
  int k() const { return static_cast<int>(parts_.size()); }
  /// Number of mixed parts.
  int a() const { return a_; }
  /// a plus the number of parts inside 1..m.
  int b() const { return b_; }

  /// "i,j|k,l" in canonical order.
  std::string to_string() const;

  friend bool operator==(const Partition& x, const Partition& y) { return x.dims_ == y.dims_ && x.raw() == y.raw(); }

 private:
  std::vector<std::vector<int>> raw() const;

  Dims dims_;
  std::vector<Part> parts_;
  int a_ = 0;
  int b_ = 0;
};

/// Parses "1,3|2,4" (1-based indices, comma-separated, parts joined by '|').
Partition parse_partition(Dims dims, std::string_view spec);

/// (p, q) in P(pi): every part's coordinates have gcd 1.
bool in_P_pi(const Partition& pi, std::span<const std::int64_t> p, std::span<const std::int64_t> q);

/// q in Q(pi): the fibre P(pi, q) is nonempty, i.e. every part inside m+[n] has gcd 1.
bool in_Q_pi(const Partition& pi, std::span<const std::int64_t> q);

/// Some part has size >= 3 and meets m+[n].
bool has_ell(const Partition& pi);

/// Axis-aligned box [alpha_i q, beta_i q] in Z^d with a common width gamma = beta_i - alpha_i.
struct Box {
  std::vector<Frac> alpha;
  std::vector<Frac> beta;
  std::int64_t scale = 1;

  Box() = default;
  /// Validates 0 <= alpha_i < beta_i <= 1 with equal widths, and scale >= 1.
  Box(std::vector<Frac> alpha, std::vector<Frac> beta, std::int64_t scale);

  /// The full box [0, q]^d.
  static Box full(int d, std::int64_t scale);
  /// Same placements, different scale.
  Box with_scale(std::int64_t scale) const;

  int dim() const { return static_cast<int>(alpha.size()); }
  Frac gamma() const { return beta.front() - alpha.front(); }
  std::int64_t lo(int i) const { return alpha[i].ceil_mul(scale); }
  std::int64_t hi(int i) const { return beta[i].floor_mul(scale); }
};

}  // namespace kgds
