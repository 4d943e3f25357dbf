#include "kgds/limsup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kgds/error.hpp"
#include "kgds/parallel.hpp"
#include "kgds/shell.hpp"

namespace kgds {

namespace {

constexpr std::uint64_t kBatch = 1 << 14;
constexpr std::uint64_t kCombinationGuard = 1'000'000;

void check_q(std::span<const std::int64_t> q, int n) {
  if (static_cast<int>(q.size()) != n)
    throw ValidationError("q has " + std::to_string(q.size()) + " coordinates, expected n = " + std::to_string(n));
  if (max_norm(q) == 0) throw ValidationError("q must be nonzero");
}

void check_ball(const TargetBall& ball, int m) {
  if (ball.dim() != m)
    throw ValidationError("ball has dimension " + std::to_string(ball.dim()) + ", expected m = " + std::to_string(m));
}

double column_value(const PointMatrix& x, std::span<const std::int64_t> q, int i) {
  double s = 0.0;
  for (int j = 0; j < x.n(); ++j) s += static_cast<double>(q[j]) * x(j, i);
  return s;
}

bool has_candidate(double v, double r, double tol) {
  if (!(r > 0.0)) return false;
  return std::floor(-v + r + tol) >= std::ceil(-v - r - tol);
}

std::int64_t gcd_with(std::int64_t g, std::int64_t p) { return std::gcd(g, p < 0 ? -p : p); }

// Some choice of one candidate per list has overall gcd 1 together with g.
bool some_coprime_choice(const std::vector<std::vector<std::int64_t>>& lists, std::int64_t g) {
  std::uint64_t combos = 1;
  for (const auto& l : lists) {
    if (l.empty()) return false;
    combos = std::min<std::uint64_t>(combos * l.size(), kCombinationGuard + 1);
  }
  if (g == 1) return true;
  if (combos > kCombinationGuard)
    throw ResourceLimitError("candidate combinations exceed 1e6 in one part; use a smaller radius");
  std::vector<std::size_t> idx(lists.size(), 0);
  for (;;) {
    std::int64_t h = g;
    for (std::size_t k = 0; k < lists.size() && h != 1; ++k) h = gcd_with(h, lists[k][idx[k]]);
    if (h == 1) return true;
    std::size_t k = lists.size();
    while (k > 0 && idx[k - 1] + 1 == lists[k - 1].size()) idx[--k] = 0;
    if (k == 0) return false;
    ++idx[k - 1];
  }
}

void check_samples(std::uint64_t samples) {
  if (samples < 1) throw ValidationError("samples must be >= 1");
}

}  // namespace

TargetBall::TargetBall(std::vector<double> c, double r) : center(std::move(c)), radius(r) {
  if (center.empty()) throw ValidationError("ball center needs at least one coordinate");
  if (!std::isfinite(radius) || radius < 0.0) throw ValidationError("ball radius must be finite and >= 0");
  for (double v : center)
    if (!std::isfinite(v)) throw ValidationError("ball center must be finite");
}

double TargetBall::volume() const { return std::pow(2.0 * radius, dim()); }

PointMatrix::PointMatrix(int n, int m) : PointMatrix(n, m, std::vector<double>(static_cast<std::size_t>(n * m), 0.0)) {}

PointMatrix::PointMatrix(int n, int m, std::vector<double> entries) : n_(n), m_(m), data_(std::move(entries)) {
  if (n < 1 || m < 1) throw ValidationError("point matrix needs n, m >= 1");
  if (data_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
    throw ValidationError("point matrix needs n*m = " + std::to_string(n * m) + " entries");
  for (double v : data_)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("point matrix entries must lie in [0, 1]");
}

const char* set_kind_name(SetKind k) {
  switch (k) {
    case SetKind::kA: return "A";
    case SetKind::kApi: return "A_pi";
    case SetKind::kAprime: return "A_prime";
  }
  return "?";
}

std::vector<std::int64_t> translate_candidates(double v, double radius, double tol) {
  std::vector<std::int64_t> out;
  if (!(radius > 0.0)) return out;
  const double lo = std::ceil(-v - radius - tol), hi = std::floor(-v + radius + tol);
  if (hi - lo > static_cast<double>(kCombinationGuard))
    throw ResourceLimitError("too many translate candidates; use a smaller radius");
  for (double p = lo; p <= hi; p += 1.0) out.push_back(static_cast<std::int64_t>(p));
  return out;
}

bool in_A(const PointMatrix& x, std::span<const std::int64_t> q, const TargetBall& ball, double tol) {
  check_q(q, x.n());
  check_ball(ball, x.m());
  for (int i = 0; i < x.m(); ++i)
    if (!has_candidate(column_value(x, q, i) - ball.center[i], ball.radius, tol)) return false;
  return true;
}

bool in_A_pi(const PointMatrix& x, std::span<const std::int64_t> q, const TargetBall& ball, const Partition& pi,
             double tol) {
  check_q(q, x.n());
  check_ball(ball, x.m());
  if (pi.dims() != Dims(x.m(), x.n())) throw ValidationError("partition dimensions do not match the point matrix");
  if (!in_Q_pi(pi, q)) return false;
  for (int j = 0; j < pi.b(); ++j) {
    const auto& part = pi.parts()[j];
    std::int64_t g = 0;
    for (int i : part.q_coords) g = gcd_with(g, q[i]);
    std::vector<std::vector<std::int64_t>> lists;
    for (int i : part.p_coords)
      lists.push_back(translate_candidates(column_value(x, q, i) - ball.center[i], ball.radius, tol));
    if (!some_coprime_choice(lists, g)) return false;
  }
  return true;
}

bool in_A_prime(const PointMatrix& x, std::span<const std::int64_t> q, const TargetBall& ball, double tol) {
  check_q(q, x.n());
  check_ball(ball, x.m());
  const std::int64_t g = gcd_abs(q);
  for (int i = 0; i < x.m(); ++i) {
    const auto cands = translate_candidates(column_value(x, q, i) - ball.center[i], ball.radius, tol);
    if (std::none_of(cands.begin(), cands.end(), [&](std::int64_t p) { return gcd_with(g, p) == 1; })) return false;
  }
  return true;
}

bool in_set(SetKind kind, const Partition* pi, const PointMatrix& x, std::span<const std::int64_t> q,
            const TargetBall& ball, double tol) {
  switch (kind) {
    case SetKind::kA: return in_A(x, q, ball, tol);
    case SetKind::kApi:
      if (!pi) throw ValidationError("set A_pi needs a partition");
      return in_A_pi(x, q, ball, *pi, tol);
    case SetKind::kAprime: return in_A_prime(x, q, ball, tol);
  }
  return false;
}

double measure_A_exact(std::span<const std::int64_t> q, const TargetBall& ball) {
  if (max_norm(q) == 0) throw ValidationError("q must be nonzero");
  return std::min(ball.volume(), 1.0);
}

// ---------------------------------------------------------------------------

OpenSetU::OpenSetU(std::vector<Cell> c) : cells(std::move(c)) {
  if (cells.empty()) throw ValidationError("open set U needs at least one box");
  const auto d = cells.front().lo.size();
  if (d == 0) throw ValidationError("open set U boxes need a dimension");
  for (const auto& cell : cells) {
    if (cell.lo.size() != d || cell.hi.size() != d) throw ValidationError("open set U boxes differ in dimension");
    for (std::size_t k = 0; k < d; ++k)
      if (!(cell.lo[k] >= 0.0 && cell.lo[k] < cell.hi[k] && cell.hi[k] <= 1.0))
        throw ValidationError("open set U boxes must satisfy 0 <= lo < hi <= 1");
  }
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      bool overlap = true;
      for (std::size_t k = 0; k < d && overlap; ++k)
        overlap = cells[a].lo[k] < cells[b].hi[k] && cells[b].lo[k] < cells[a].hi[k];
      if (overlap)
        throw ValidationError("open set U boxes " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
    }
}

OpenSetU OpenSetU::full(int dim) { return cube(dim, 0.0, 1.0); }

OpenSetU OpenSetU::cube(int dim, double lo, double side) {
  if (dim < 1) throw ValidationError("open set U needs dimension >= 1");
  Cell c{std::vector<double>(static_cast<std::size_t>(dim), lo), std::vector<double>(static_cast<std::size_t>(dim), lo + side)};
  return OpenSetU({c});
}

double OpenSetU::measure() const {
  double total = 0.0;
  for (const auto& c : cells) {
    double v = 1.0;
    for (std::size_t k = 0; k < c.lo.size(); ++k) v *= c.hi[k] - c.lo[k];
    total += v;
  }
  return total;
}

USampler::USampler(const OpenSetU& u) : u_(&u) {
  if (u.cells.empty()) throw ValidationError("open set U is empty");
  double acc = 0.0;
  for (const auto& c : u.cells) {
    double v = 1.0;
    for (std::size_t k = 0; k < c.lo.size(); ++k) v *= c.hi[k] - c.lo[k];
    acc += v;
    cumulative_.push_back(acc);
  }
}

void USampler::draw(Rng& rng, std::span<double> out) const {
  std::size_t pick = 0;
  if (cumulative_.size() > 1) {
    const double t = rng.uniform() * cumulative_.back();
    pick = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), t) - cumulative_.begin());
    pick = std::min(pick, cumulative_.size() - 1);
  }
  const auto& c = u_->cells[pick];
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = c.lo[k] + (c.hi[k] - c.lo[k]) * rng.uniform();
}

MeasureEstimate mc_measure(SetKind kind, const Partition* pi, std::span<const std::int64_t> q,
                           const TargetBall& ball, const OpenSetU& u, std::uint64_t samples, std::uint64_t seed,
                           unsigned threads) {
  check_samples(samples);
  const int n = static_cast<int>(q.size());
  const int m = ball.dim();
  if (n < 1) throw ValidationError("q must have at least one coordinate");
  if (u.dim() != n * m)
    throw ValidationError("open set U has dimension " + std::to_string(u.dim()) + ", expected n*m = " +
                          std::to_string(n * m));
  check_q(q, n);
  USampler sampler(u);
  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<std::uint64_t> hits(batches, 0);
  parallel_for(batches, threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b, 0x4d43));
    PointMatrix x(n, m);
    const std::uint64_t count = std::min(kBatch, samples - b * kBatch);
    std::uint64_t h = 0;
    for (std::uint64_t s = 0; s < count; ++s) {
      sampler.draw(rng, x.flat());
      if (in_set(kind, pi, x, q, ball)) ++h;
    }
    hits[b] = h;
  });
  const auto total = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  const double f = static_cast<double>(total) / static_cast<double>(samples);
  const double vol = u.measure();
  return {f * vol, vol * std::sqrt(f * (1.0 - f) / static_cast<double>(samples)), samples, seed};
}

RatioEstimate uniformity_ratio(SetKind kind, const Partition* pi, std::int64_t shell, const TargetBall& ball,
                               const OpenSetU& u, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  check_samples(samples);
  if (shell < 1) throw ValidationError("shell index must be >= 1");
  const int m = ball.dim();
  const int n = pi ? pi->dims().n : (m > 0 ? u.dim() / m : 0);
  if (n < 1 || u.dim() != n * m) throw ValidationError("open set U dimension does not match n*m");
  const double denom = std::min(ball.volume(), 1.0);
  if (!(denom > 0.0)) throw UndefinedRatioError("uniformity ratio undefined for an empty ball");
  USampler sampler(u);
  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<std::uint64_t> hits(batches, 0);
  parallel_for(batches, threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b, 0x5552));
    PointMatrix x(n, m);
    std::vector<std::int64_t> q(static_cast<std::size_t>(n));
    const std::uint64_t count = std::min(kBatch, samples - b * kBatch);
    std::uint64_t h = 0;
    for (std::uint64_t s = 0; s < count; ++s) {
      sample_shell_vector(n, shell, rng, q);
      sampler.draw(rng, x.flat());
      if (in_set(kind, pi, x, q, ball)) ++h;
    }
    hits[b] = h;
  });
  const auto total = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  const double f = static_cast<double>(total) / static_cast<double>(samples);
  return {f / denom, std::sqrt(f * (1.0 - f) / static_cast<double>(samples)) / denom, samples};
}

std::vector<std::optional<double>> qi_ratio_schedule(SetKind kind, const Partition* pi, const ApproxFunction& psi,
                                                     const std::vector<std::int64_t>& schedule,
                                                     std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  check_samples(samples);
  if (schedule.empty()) throw ValidationError("qi schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (schedule[i] < 1 || (i && schedule[i] <= schedule[i - 1]))
      throw ValidationError("qi schedule must be positive and strictly increasing");
  const int m = psi.dims().m, n = psi.dims().n;
  if (pi && pi->dims() != psi.dims()) throw ValidationError("partition dimensions do not match psi");
  const std::int64_t q_max = schedule.back();
  std::vector<TargetBall> balls;
  for (std::int64_t t = 1; t <= q_max; ++t) balls.emplace_back(psi.center(t), psi(t));

  // Per batch: sums of N and N^2 at every scheduled Q, as integers.
  using Sums = std::vector<std::pair<std::uint64_t, std::uint64_t>>;
  const std::uint64_t batch = 256;
  const std::uint64_t batches = (samples + batch - 1) / batch;
  std::vector<Sums> partial(batches, Sums(schedule.size(), {0, 0}));
  const OpenSetU cube = OpenSetU::full(n * m);
  USampler sampler(cube);
  parallel_for(batches, threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b, 0x5149));
    PointMatrix x(n, m);
    const std::uint64_t count = std::min(batch, samples - b * batch);
    std::vector<std::uint64_t> per_shell(static_cast<std::size_t>(q_max) + 1);
    for (std::uint64_t s = 0; s < count; ++s) {
      sampler.draw(rng, x.flat());
      for (std::int64_t t = 1; t <= q_max; ++t) {
        const auto& ball = balls[static_cast<std::size_t>(t - 1)];
        std::uint64_t h = 0;
        if (ball.radius > 0.0)
          for_each_shell_vector(n, t, [&](std::span<const std::int64_t> q) {
            if (kind == SetKind::kA) {
              for (int i = 0; i < m; ++i)
                if (!has_candidate(column_value(x, q, i) - ball.center[i], ball.radius, kBoundaryTol)) return;
              ++h;
            } else if (in_set(kind, pi, x, q, ball)) {
              ++h;
            }
          });
        per_shell[t] = h;
      }
      std::uint64_t running = 0;
      std::size_t k = 0;
      for (std::int64_t t = 1; t <= q_max; ++t) {
        running += per_shell[t];
        if (t == schedule[k]) {
          partial[b][k].first += running;
          partial[b][k].second += running * running;
          ++k;
        }
      }
    }
  });
  std::vector<std::optional<double>> out;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    long double s1 = 0, s2 = 0;
    for (const auto& p : partial) {
      s1 += p[k].first;
      s2 += p[k].second;
    }
    if (s2 == 0) {
      out.emplace_back();
      continue;
    }
    const long double mean = s1 / samples, second = s2 / samples;
    out.emplace_back(static_cast<double>(mean * mean / second));
  }
  return out;
}

double qi_ratio(SetKind kind, const Partition* pi, const ApproxFunction& psi, std::int64_t Q, std::uint64_t samples,
                std::uint64_t seed, unsigned threads) {
  if (Q < 1) throw ValidationError("Q must be >= 1");
  const auto r = qi_ratio_schedule(kind, pi, psi, {Q}, samples, seed, threads);
  if (!r.front()) throw UndefinedRatioError("E[N^2] is 0 up to Q = " + std::to_string(Q) + "; every set was missed");
  return *r.front();
}

}  // namespace kgds
