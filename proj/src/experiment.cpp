#include "kgds/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kgds/arith.hpp"
#include "kgds/error.hpp"
#include "kgds/parallel.hpp"
#include "kgds/rng.hpp"
#include "kgds/shell.hpp"
#include "kgds/sieve.hpp"

namespace kgds {

namespace {

constexpr std::uint64_t kCombinationGuard = 1'000'000;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

void check_Q(std::int64_t Q, const char* where) {
  if (Q < 1) throw ValidationError(std::string(where) + ": Q must be >= 1, got " + std::to_string(Q));
}

std::int64_t abs64(std::int64_t v) { return v < 0 ? -v : v; }

// Records S at every scheduled Q and at Q/10, Q/100 of each for the verdicts.
struct Recorder {
  std::vector<std::int64_t> schedule;
  std::vector<std::int64_t> wanted;  // sorted, unique
  std::vector<double> seen;          // parallel to wanted
  std::size_t next = 0;

  explicit Recorder(std::int64_t q) : schedule(schedule_125(q)) {
    for (auto s : schedule) {
      wanted.push_back(s);
      if (s >= 10) wanted.push_back(s / 10);
      if (s >= 100) wanted.push_back(s / 100);
    }
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    seen.assign(wanted.size(), 0.0);
  }
  void see(std::int64_t t, long double s) {
    if (next < wanted.size() && wanted[next] == t) seen[next++] = static_cast<double>(s);
  }
  double at(std::int64_t t) const {
    const auto it = std::lower_bound(wanted.begin(), wanted.end(), t);
    return (it != wanted.end() && *it == t) ? seen[static_cast<std::size_t>(it - wanted.begin())] : 0.0;
  }
  PartialSums finish(const VerdictRule& rule) const {
    PartialSums out;
    out.Q = schedule;
    for (auto s : schedule) {
      out.S.push_back(at(s));
      out.verdicts.push_back(decide_verdict(at(s), at(s / 10), at(s / 100), s, rule));
    }
    const auto Q = schedule.back();
    out.verdict = out.verdicts.back();
    const double d0 = at(Q / 10) - at(Q / 100);
    out.tail_ratio = (Q >= 100 && d0 > 0.0) ? (at(Q) - at(Q / 10)) / d0 : 0.0;
    return out;
  }
};

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::int64_t> schedule_125(std::int64_t q_max) {
  check_Q(q_max, "schedule");
  std::vector<std::int64_t> out;
  for (std::int64_t base = 1; base <= q_max; base *= 10) {
    for (std::int64_t f : {1, 2, 5}) {
      if (base > std::numeric_limits<std::int64_t>::max() / f) break;
      const auto v = base * f;
      if (v < q_max) out.push_back(v);
    }
    if (base > std::numeric_limits<std::int64_t>::max() / 10) break;
  }
  out.push_back(q_max);
  return out;
}

std::vector<std::int64_t> schedule_decades(std::int64_t q_max) {
  check_Q(q_max, "schedule");
  std::vector<std::int64_t> out;
  for (std::int64_t v = 10; v < q_max; v *= 10) {
    out.push_back(v);
    if (v > std::numeric_limits<std::int64_t>::max() / 10) break;
  }
  out.push_back(q_max);
  return out;
}

std::vector<std::int64_t> parse_schedule(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw ValidationError("schedule '" + text + "': bad entry '" + tok + "'");
    }
    if (used != tok.size()) throw ValidationError("schedule '" + text + "': bad entry '" + tok + "'");
    if (v < 1 || (!out.empty() && v <= out.back()))
      throw ValidationError("schedule '" + text + "' must be positive and strictly increasing");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("schedule is empty");
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kDiverging: return "diverging";
    case Verdict::kConverging: return "converging";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

Verdict decide_verdict(double s_q, double s_q10, double s_q100, std::int64_t Q, const VerdictRule& rule) {
  if (Q < 100) return Verdict::kInconclusive;
  const double d1 = s_q - s_q10, d0 = s_q10 - s_q100;
  if (d1 <= 0.0) return Verdict::kConverging;
  if (d0 <= 0.0) return Verdict::kInconclusive;
  const double ratio = d1 / d0;
  if (ratio < rule.converge_below) return Verdict::kConverging;
  if (ratio >= rule.diverge_at_least) return Verdict::kDiverging;
  return Verdict::kInconclusive;
}

PartialSums series_kg(const ApproxFunction& psi, std::int64_t Q, const VerdictRule& rule, Budget& budget) {
  check_Q(Q, "series_kg");
  budget.charge(static_cast<std::uint64_t>(Q), "series_kg");
  const int m = psi.dims().m, n = psi.dims().n;
  Recorder rec(Q);
  long double s = 0.0L;
  for (std::int64_t q = 1; q <= Q; ++q) {
    const double r = psi(q);
    if (r > 0.0) s += std::pow(static_cast<long double>(q), n - 1) * std::pow(static_cast<long double>(r), m);
    rec.see(q, s);
  }
  return rec.finish(rule);
}

PartialSums series_ds(const ApproxFunction& psi, std::int64_t Q, const VerdictRule& rule, Budget& budget) {
  check_Q(Q, "series_ds");
  const int m = psi.dims().m, n = psi.dims().n;
  const auto logq = static_cast<std::uint64_t>(std::log2(static_cast<double>(Q)) + 2);
  budget.charge(sat_mul(static_cast<std::uint64_t>(Q), logq + 2), "series_ds");
  const auto prim = primitive_shell_counts(n, Q);
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(Q));
  std::vector<long double> weight(static_cast<std::size_t>(Q) + 1, 0.0L);
  for (std::int64_t d = 1; d <= Q; ++d) {
    const long double f = std::pow(static_cast<long double>(sieve->phi(static_cast<std::uint64_t>(d))) / d, m);
    for (std::int64_t t = d, k = 1; t <= Q; t += d, ++k)
      if (prim[k]) weight[t] += f * static_cast<long double>(prim[k]);
  }
  Recorder rec(Q);
  long double s = 0.0L;
  for (std::int64_t t = 1; t <= Q; ++t) {
    const double r = psi(t);
    if (r > 0.0) s += std::pow(static_cast<long double>(r), m) * weight[t];
    rec.see(t, s);
  }
  return rec.finish(rule);
}

SeriesReport series_report(const ApproxFunction& psi, std::int64_t Q, const VerdictRule& rule, Budget& budget) {
  const auto kg = series_kg(psi, Q, rule, budget);
  const auto ds = series_ds(psi, Q, rule, budget);
  SeriesReport rep;
  rep.psi = psi.describe();
  rep.dims = psi.dims();
  rep.Q = kg.Q;
  rep.S_kg = kg.S;
  rep.S_ds = ds.S;
  rep.row_verdict_kg = kg.verdicts;
  rep.row_verdict_ds = ds.verdicts;
  rep.verdict_kg = kg.verdict;
  rep.verdict_ds = ds.verdict;
  rep.tail_ratio_kg = kg.tail_ratio;
  rep.tail_ratio_ds = ds.tail_ratio;
  return rep;
}

// ---------------------------------------------------------------------------

const char* mode_name(CountMode m) {
  switch (m) {
    case CountMode::kPlain: return "plain";
    case CountMode::kPartition: return "partition";
    case CountMode::kCoprime: return "coprime-per-coordinate";
  }
  return "?";
}

void DichotomyConfig::resolve() {
  if (psi.dims() != dims) throw ValidationError("psi was built for different dimensions than the run");
  if (mode == CountMode::kPartition && !partition) throw ValidationError("mode partition requires a partition");
  if (mode != CountMode::kPartition && partition)
    throw ValidationError(std::string("mode ") + mode_name(mode) + " does not take a partition");
  if (partition && partition->dims() != dims) throw ValidationError("partition dimensions do not match m, n");
  if (mode == CountMode::kCoprime && dims.n <= 2 && !allow_conjecture)
    throw ValidationError("coprime-per-coordinate runs need n > 2; pass --allow-conjecture to probe n <= 2");
  if (x_samples < 1) throw ValidationError("x-samples must be >= 1");
  if (schedule.empty()) {
    if (q_max < 1) throw ValidationError("q-max must be >= 1");
    schedule = schedule_decades(q_max);
  }
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (schedule[i] < 1 || (i && schedule[i] <= schedule[i - 1]))
      throw ValidationError("schedule must be positive and strictly increasing");
  if (q_max != 0 && q_max != schedule.back())
    throw ValidationError("schedule must end at q-max = " + std::to_string(q_max));
  q_max = schedule.back();
  if (!y) {
    Rng rng(derive_seed(seed, 0, 0x59));
    std::vector<double> v(static_cast<std::size_t>(dims.m));
    for (auto& c : v) c = rng.uniform();
    y = std::move(v);
  }
  if (static_cast<int>(y->size()) != dims.m)
    throw ValidationError("y must have m = " + std::to_string(dims.m) + " coordinates");
  psi = psi.with_shift(*y);
}

std::vector<double> dichotomy_point(std::uint64_t seed, std::uint64_t index, const Dims& dims) {
  Rng rng(derive_seed(seed, index, 0x58));
  std::vector<double> x(static_cast<std::size_t>(dims.n * dims.m));
  for (auto& v : x) v = rng.uniform();
  return x;
}

namespace {

struct HitCounter {
  const DichotomyConfig& cfg;
  int m, n;
  std::vector<double> radius;                // [t], t = 0..Q
  std::vector<double> reach;                 // max radius over [t, Q]
  std::vector<const std::vector<double>*> centers;

  explicit HitCounter(const DichotomyConfig& c) : cfg(c), m(c.dims.m), n(c.dims.n) {
    const auto Q = c.q_max;
    radius.assign(static_cast<std::size_t>(Q) + 1, 0.0);
    centers.assign(static_cast<std::size_t>(Q) + 1, &c.psi.shift());
    for (std::int64_t t = 1; t <= Q; ++t) {
      radius[t] = c.psi(t);
      centers[t] = &c.psi.center(t);
    }
    reach.assign(radius.size() + 1, 0.0);
    for (std::int64_t t = Q; t >= 0; --t) reach[t] = std::max(reach[t + 1], radius[t]);
    reach[0] = reach.size() > 1 ? reach[1] : 0.0;
  }

  // Integers p with |v - p| < r.
  static void window(double v, double r, std::int64_t& lo, std::int64_t& hi) {
    lo = static_cast<std::int64_t>(std::floor(v - r)) + 1;
    hi = static_cast<std::int64_t>(std::ceil(v + r)) - 1;
  }

  std::uint64_t constrained(std::span<const std::int64_t> q, const std::vector<std::int64_t>& lo,
                            const std::vector<std::int64_t>& hi) const {
    if (cfg.mode == CountMode::kCoprime) {
      const auto g = gcd_abs(q);
      std::uint64_t total = 1;
      for (int i = 0; i < m && total; ++i) {
        std::uint64_t c = 0;
        for (auto p = lo[i]; p <= hi[i]; ++p) c += std::gcd(g, abs64(p)) == 1;
        total *= c;
      }
      return total;
    }
    const auto& pi = *cfg.partition;
    if (!in_Q_pi(pi, q)) return 0;
    std::uint64_t total = 1;
    for (int j = 0; j < pi.b() && total; ++j) {
      const auto& part = pi.parts()[j];
      std::int64_t g = 0;
      for (int i : part.q_coords) g = std::gcd(g, abs64(q[i]));
      std::uint64_t combos = 1;
      for (int i : part.p_coords) combos = sat_mul(combos, static_cast<std::uint64_t>(hi[i] - lo[i] + 1));
      if (g == 1) {
        total = sat_mul(total, combos);
        continue;
      }
      if (combos > kCombinationGuard) throw ResourceLimitError("too many p candidates for one part; lower psi");
      std::vector<std::int64_t> p(part.p_coords.size());
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[part.p_coords[k]];
      std::uint64_t good = 0;
      for (;;) {
        std::int64_t h = g;
        for (auto v : p) h = std::gcd(h, abs64(v));
        good += h == 1;
        std::size_t k = p.size();
        while (k > 0 && p[k - 1] == hi[part.p_coords[k - 1]]) {
          p[k - 1] = lo[part.p_coords[k - 1]];
          --k;
        }
        if (k == 0) break;
        ++p[k - 1];
      }
      total *= good;
    }
    return total;
  }

  // Adds the hits of q (|q| = t) to the per-shell tallies.
  void visit(std::span<const std::int64_t> q, std::int64_t t, const std::vector<double>& x,
             std::vector<std::uint64_t>& plain, std::vector<std::uint64_t>& cons, std::vector<std::int64_t>& lo,
             std::vector<std::int64_t>& hi) const {
    const double r = radius[t];
    if (!(r > 0.0)) return;
    const auto& c = *centers[t];
    std::uint64_t count = 1;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += static_cast<double>(q[j]) * x[static_cast<std::size_t>(j * m + i)];
      window(s - c[i], r, lo[i], hi[i]);
      if (hi[i] < lo[i]) return;
      count *= static_cast<std::uint64_t>(hi[i] - lo[i] + 1);
    }
    plain[t] += count;
    cons[t] += cfg.mode == CountMode::kPlain ? count : constrained(q, lo, hi);
  }

  // Every q in the ball; used when centers move with t.
  std::uint64_t brute(const std::vector<double>& x, std::vector<std::uint64_t>& plain,
                      std::vector<std::uint64_t>& cons) const {
    std::vector<std::int64_t> lo(m), hi(m);
    std::uint64_t ops = 0;
    for (std::int64_t t = 1; t <= cfg.q_max; ++t) {
      if (!(radius[t] > 0.0)) continue;
      ops = sat_add(ops, shell_size(n, t));
      for_each_shell_vector(n, t, [&](std::span<const std::int64_t> q) { visit(q, t, x, plain, cons, lo, hi); });
    }
    return ops;
  }

  // Fixed center: sort frac(k x) over the last q-coordinate, then for each
  // prefix of the other coordinates look up the k whose first column lands
  // within reach of an integer translate of the center.
  std::uint64_t sorted(const std::vector<double>& x, std::vector<std::uint64_t>& plain,
                       std::vector<std::uint64_t>& cons) const {
    const auto Q = cfg.q_max;
    const int L = n - 1;
    const double xl = x[static_cast<std::size_t>(L * m)];
    std::vector<std::pair<double, std::int64_t>> fr;
    fr.reserve(static_cast<std::size_t>(2 * Q + 1));
    for (std::int64_t k = -Q; k <= Q; ++k) {
      const double v = static_cast<double>(k) * xl;
      fr.emplace_back(v - std::floor(v), k);
    }
    std::sort(fr.begin(), fr.end());
    std::vector<double> keys(fr.size());
    for (std::size_t i = 0; i < fr.size(); ++i) keys[i] = fr[i].first;

    const double y0 = cfg.psi.shift()[0];
    std::vector<std::int64_t> q(static_cast<std::size_t>(n), -Q), lo(m), hi(m);
    std::uint64_t ops = fr.size();
    const auto log_cost = static_cast<std::uint64_t>(std::log2(static_cast<double>(fr.size())) + 1);
    auto scan = [&](std::size_t from, std::size_t to, std::int64_t t0) {
      for (std::size_t i = from; i < to; ++i) {
        const auto k = fr[i].second;
        q[L] = k;
        const auto t = std::max(t0, abs64(k));
        if (t == 0) continue;
        visit(q, t, x, plain, cons, lo, hi);
      }
      ops += to - from;
    };
    for (;;) {
      std::int64_t t0 = 0;
      double a0 = 0.0;
      for (int j = 0; j < L; ++j) {
        t0 = std::max(t0, abs64(q[j]));
        a0 += static_cast<double>(q[j]) * x[static_cast<std::size_t>(j * m)];
      }
      const double r = reach[t0];
      if (r > 0.0) {
        ops += log_cost;
        const double delta = r + 1e-9;
        if (delta >= 0.5) {
          scan(0, fr.size(), t0);
        } else {
          double c = y0 - a0;
          c -= std::floor(c);
          auto idx = [&](double v) {
            return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), v) - keys.begin());
          };
          const double a = c - delta, b = c + delta;
          if (a < 0.0) {
            scan(idx(a + 1.0), fr.size(), t0);
            scan(0, idx(b), t0);
          } else if (b > 1.0) {
            scan(idx(a), fr.size(), t0);
            scan(0, idx(b - 1.0), t0);
          } else {
            scan(idx(a), idx(b), t0);
          }
        }
      }
      int j = L - 1;
      while (j >= 0 && q[j] == Q) {
        q[j] = -Q;
        --j;
      }
      if (j < 0) break;
      ++q[j];
    }
    return ops;
  }
};

double median(std::vector<std::uint64_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? static_cast<double>(v[h]) : 0.5 * (static_cast<double>(v[h - 1]) + static_cast<double>(v[h]));
}

}  // namespace

ExperimentRun run_dichotomy(DichotomyConfig config, Budget& budget, unsigned threads) {
  config.resolve();
  ExperimentRun run;
  const auto& cfg = config;
  const int n = cfg.dims.n;
  const auto Q = cfg.q_max;

  const bool moving = cfg.psi.has_center_table();
  std::uint64_t prefixes = 1;
  for (int j = 0; j < n - 1; ++j) prefixes = sat_mul(prefixes, static_cast<std::uint64_t>(2 * Q + 1));
  const std::uint64_t per_x = moving ? shell_size(n, Q) : sat_mul(prefixes, static_cast<std::uint64_t>(std::log2(2.0 * Q + 1) + 2));
  budget.require(sat_mul(per_x, cfg.x_samples), "dichotomy enumeration");

  HitCounter counter(cfg);
  const auto N = cfg.x_samples;
  const auto K = cfg.schedule.size();
  run.hits_plain.assign(N, std::vector<std::uint64_t>(K, 0));
  run.hits_constrained.assign(N, std::vector<std::uint64_t>(K, 0));
  std::vector<std::uint64_t> ops(N, 0);
  parallel_for(N, threads, [&](std::size_t xi) {
    const auto x = dichotomy_point(cfg.seed, xi, cfg.dims);
    std::vector<std::uint64_t> plain(static_cast<std::size_t>(Q) + 1, 0), cons(plain.size(), 0);
    ops[xi] = moving ? counter.brute(x, plain, cons) : counter.sorted(x, plain, cons);
    budget.charge(ops[xi], "dichotomy enumeration");
    std::uint64_t cp = 0, cc = 0;
    std::size_t k = 0;
    for (std::int64_t t = 1; t <= Q && k < K; ++t) {
      cp += plain[t];
      cc += cons[t];
      while (k < K && cfg.schedule[k] == t) {
        run.hits_plain[xi][k] = cp;
        run.hits_constrained[xi][k] = cc;
        ++k;
      }
    }
  });
  for (auto o : ops) run.operations = sat_add(run.operations, o);

  for (std::size_t k = 0; k < K; ++k) {
    WindowSummary w;
    w.Q = cfg.schedule[k];
    std::uint64_t grew = 0;
    std::vector<std::uint64_t> col(N);
    for (std::size_t xi = 0; xi < N; ++xi) {
      const auto now = run.hits_constrained[xi][k];
      const auto before = k ? run.hits_constrained[xi][k - 1] : 0;
      grew += now > before;
      col[xi] = now;
    }
    w.frac_x_with_new_hits = static_cast<double>(grew) / static_cast<double>(N);
    w.median_hits = median(std::move(col));
    run.summary.push_back(w);
  }

  switch (cfg.mode) {
    case CountMode::kPlain:
      if (!cfg.psi.monotone()) {
        run.in_hypothesis = false;
        run.hypothesis_note = "psi is not monotone";
      }
      break;
    case CountMode::kPartition:
      if (!cfg.psi.monotone() && !has_ell(*cfg.partition)) {
        run.in_hypothesis = false;
        run.hypothesis_note = "psi is not monotone and no part of size >= 3 meets the q-indices";
      }
      break;
    case CountMode::kCoprime:
      if (n <= 2) {
        run.in_hypothesis = false;
        run.hypothesis_note = "n <= 2 probes an open conjecture";
      }
      break;
  }
  run.config = std::move(config);
  return run;
}

}  // namespace kgds
