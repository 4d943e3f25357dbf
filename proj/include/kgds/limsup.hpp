#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kgds/approx.hpp"
#include "kgds/partition.hpp"
#include "kgds/rng.hpp"

namespace kgds {

// Sets in the unit cube of x in R^{n x m}, for a nonzero q in Z^n and a
// target ball B in R^m:
//   A(q, B)   = {x : qx + p in B for some p in Z^m}
//   A^pi(q,B) = same with (p, q) in P(pi)
//   A'(q, B)  = same with gcd(p_i, q_1, ..., q_n) = 1 for every i
// Here (qx)_i = sum_j q_j x_{j,i}. The sign convention qx - p gives the same
// sets under p -> -p.

/// Max-norm ball with volume (2r)^m. Membership is closed up to `kBoundaryTol`.
struct TargetBall {
  std::vector<double> center;
  double radius = 0.0;

  TargetBall() = default;
  TargetBall(std::vector<double> center, double radius);  // radius >= 0, finite
  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
};

inline constexpr double kBoundaryTol = 1e-12;

/// n x m matrix with entries in [0, 1]; column i is x_i in R^n.
class PointMatrix {
 public:
  PointMatrix(int n, int m);
  /// Row-major entries x(0,0), x(0,1), ..., x(n-1,m-1).
  PointMatrix(int n, int m, std::vector<double> entries);
  int n() const { return n_; }
  int m() const { return m_; }
  double operator()(int j, int i) const { return data_[static_cast<std::size_t>(j * m_ + i)]; }
  double& at(int j, int i) { return data_[static_cast<std::size_t>(j * m_ + i)]; }
  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

 private:
  int n_, m_;
  std::vector<double> data_;
};

enum class SetKind { kA, kApi, kAprime };

const char* set_kind_name(SetKind k);

/// Integers p with |v + p| <= r (plus tolerance); empty when r <= 0.
std::vector<std::int64_t> translate_candidates(double v, double radius, double tol = kBoundaryTol);

bool in_A(const PointMatrix& x, std::span<const std::int64_t> q, const TargetBall& ball, double tol = kBoundaryTol);
/// Throws ResourceLimitError if a part needs more than 10^6 candidate combinations.
bool in_A_pi(const PointMatrix& x, std::span<const std::int64_t> q, const TargetBall& ball, const Partition& pi,
             double tol = kBoundaryTol);
bool in_A_prime(const PointMatrix& x, std::span<const std::int64_t> q, const TargetBall& ball,
                double tol = kBoundaryTol);

/// Dispatch; `pi` must be set for kApi.
bool in_set(SetKind kind, const Partition* pi, const PointMatrix& x, std::span<const std::int64_t> q,
            const TargetBall& ball, double tol = kBoundaryTol);

/// |A(q, B)| = min((2r)^m, 1).
double measure_A_exact(std::span<const std::int64_t> q, const TargetBall& ball);

/// Union of pairwise-disjoint boxes in [0,1]^{nm}; coordinates follow the
/// row-major order of PointMatrix.
struct OpenSetU {
  struct Cell {
    std::vector<double> lo, hi;
  };
  std::vector<Cell> cells;

  OpenSetU() = default;
  explicit OpenSetU(std::vector<Cell> cells);  // validates
  static OpenSetU full(int dim);
  /// The cube [lo, lo + side]^dim.
  static OpenSetU cube(int dim, double lo, double side);
  int dim() const { return cells.empty() ? 0 : static_cast<int>(cells.front().lo.size()); }
  double measure() const;
};

struct MeasureEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Draws points of U (cell by volume, then uniform) into `out` (length dim).
class USampler {
 public:
  explicit USampler(const OpenSetU& u);
  void draw(Rng& rng, std::span<double> out) const;

 private:
  const OpenSetU* u_;
  std::vector<double> cumulative_;
};

/// Monte Carlo estimate of |set(q, B) ∩ U|. Sample points depend only on
/// (U, samples, seed), so estimates for different set kinds share samples.
MeasureEstimate mc_measure(SetKind kind, const Partition* pi, std::span<const std::int64_t> q,
                           const TargetBall& ball, const OpenSetU& u, std::uint64_t samples, std::uint64_t seed,
                           unsigned threads = 1);

struct RatioEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// [sum_{|q| = q} |set(q,B) ∩ U|] / [sum_{|q| = q} min(|B|,1) |U|], estimated by
/// drawing (q, x) jointly, q uniform on the shell and x uniform on U.
RatioEstimate uniformity_ratio(SetKind kind, const Partition* pi, std::int64_t shell, const TargetBall& ball,
                               const OpenSetU& u, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

/// (E N)^2 / E[N^2] with N(x) = #{q : 1 <= |q| <= Q, x in set(q, B_|q|)} and
/// B_t the ball of radius psi(t) about psi.center(t); x uniform on the cube.
/// One value per entry of `schedule` (ascending). Entries whose E[N^2] is 0
/// are empty.
std::vector<std::optional<double>> qi_ratio_schedule(SetKind kind, const Partition* pi, const ApproxFunction& psi,
                                                     const std::vector<std::int64_t>& schedule,
                                                     std::uint64_t samples, std::uint64_t seed,
                                                     unsigned threads = 1);

/// Single Q; throws UndefinedRatioError when E[N^2] is 0.
double qi_ratio(SetKind kind, const Partition* pi, const ApproxFunction& psi, std::int64_t Q, std::uint64_t samples,
                std::uint64_t seed, unsigned threads = 1);

}  // namespace kgds
