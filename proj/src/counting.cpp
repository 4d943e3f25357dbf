#include "kgds/counting.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include "kgds/error.hpp"
#include "kgds/parallel.hpp"
#include "kgds/shell.hpp"

namespace kgds {

namespace {

using u128 = unsigned __int128;

void check_q(std::int64_t q, const char* where) {
  if (q < 1) throw ValidationError(std::string(where) + ": q must be >= 1, got " + std::to_string(q));
}

void check_interval(Frac alpha, Frac beta, const char* where) {
  if (alpha < Frac(0, 1) || !(alpha < beta) || Frac(1, 1) < beta)
    throw ValidationError(std::string(where) + ": need 0 <= alpha < beta <= 1, got [" + to_string(alpha) + ", " +
                          to_string(beta) + "]");
}

void check_gamma(Frac gamma, const char* where) {
  if (!(Frac(0, 1) < gamma) || Frac(1, 1) < gamma)
    throw ValidationError(std::string(where) + ": gamma must lie in (0, 1], got " + to_string(gamma));
}

std::uint64_t to_u64(u128 v, const char* where) {
  if (v > std::numeric_limits<std::uint64_t>::max())
    throw ResourceLimitError(std::string(where) + ": count exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

BigInt to_big(u128 v) {
  BigInt hi = static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64));
  BigInt lo = static_cast<unsigned long>(static_cast<std::uint64_t>(v));
  return (hi << 64) + lo;
}

Rational pow_q(std::int64_t q, int e) {
  BigInt b = static_cast<long>(q);
  BigInt out;
  if (e >= 0) {
    mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
    return Rational(out);
  }
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(-e));
  Rational r(BigInt(1), out);
  r.canonicalize();
  return r;
}

// multiples of e in [lo, hi], 0 <= lo
std::int64_t multiples(std::int64_t lo, std::int64_t hi, std::int64_t e) {
  if (hi < lo) return 0;
  return hi / e - (lo + e - 1) / e + 1;
}

struct Ranges {
  std::vector<std::int64_t> lo, hi;

  u128 product(std::int64_t e) const {
    u128 out = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const auto c = multiples(lo[i], hi[i], e);
      if (c <= 0) return 0;
      out *= static_cast<u128>(c);
    }
    return out;
  }
  bool has_zero() const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > 0 || hi[i] < 0) return false;
    return true;
  }
  std::int64_t reach() const {
    std::int64_t r = 0;
    for (auto h : hi) r = std::max(r, h);
    return r;
  }
};

// nonzero p in the ranges with gcd(p) = 1
u128 primitive_in(const Ranges& r, const SieveTable& sieve) {
  const auto reach = r.reach();
  if (reach <= 0) return 0;
  const u128 z = r.has_zero() ? 1 : 0;
  __int128 total = 0;
  for (std::int64_t e = 1; e <= reach; ++e) {
    const int m = sieve.mu(static_cast<std::uint64_t>(e));
    if (m == 0) continue;
    const u128 c = r.product(e) - z;
    total += m * static_cast<__int128>(c);
  }
  return static_cast<u128>(total);
}

// p in the ranges with gcd(p, g) = 1, g >= 1
u128 coprime_to_in(const Ranges& r, std::int64_t g, const SieveTable& sieve) {
  __int128 total = 0;
  for (auto [f, m] : sieve.squarefree_divisors(static_cast<std::uint64_t>(g)))
    total += m * static_cast<__int128>(r.product(static_cast<std::int64_t>(f)));
  return static_cast<u128>(total);
}

Ranges ranges_for(const std::vector<int>& coords, const Box& box) {
  Ranges r;
  for (int i : coords) {
    r.lo.push_back(box.lo(i));
    r.hi.push_back(box.hi(i));
  }
  return r;
}

std::vector<Frac> upper_ends(const std::vector<Frac>& alpha, Frac gamma) {
  std::vector<Frac> beta;
  beta.reserve(alpha.size());
  for (auto a : alpha) beta.push_back(a + gamma);
  return beta;
}

}  // namespace

// ---------------------------------------------------------------------------

std::int64_t count_coprime_interval_scan(std::int64_t q, Frac alpha, Frac beta) {
  check_q(q, "count_coprime_interval");
  check_interval(alpha, beta, "count_coprime_interval");
  std::int64_t count = 0;
  for (std::int64_t p = alpha.ceil_mul(q), hi = beta.floor_mul(q); p <= hi; ++p)
    if (std::gcd(p, q) == 1) ++count;
  return count;
}

std::int64_t count_coprime_interval_mobius(std::int64_t q, Frac alpha, Frac beta, const SieveTable& sieve) {
  check_q(q, "count_coprime_interval");
  check_interval(alpha, beta, "count_coprime_interval");
  std::int64_t total = 0;
  for (auto [f, m] : sieve.squarefree_divisors(static_cast<std::uint64_t>(q))) {
    const auto d = q / static_cast<std::int64_t>(f);
    const auto theta = beta.floor_mul(d) - alpha.ceil_mul(d) + 1;
    if (theta > 0) total += m * theta;
  }
  return total;
}

std::int64_t count_coprime_interval(std::int64_t q, Frac alpha, Frac beta) {
  const auto scan = count_coprime_interval_scan(q, alpha, beta);
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q));
  const auto mob = count_coprime_interval_mobius(q, alpha, beta, *sieve);
  if (scan != mob)
    throw ConsistencyError("coprime interval count mismatch at q=" + std::to_string(q) + ": scan " +
                           std::to_string(scan) + " vs moebius " + std::to_string(mob));
  return scan;
}

std::vector<Frac> random_placement(Frac gamma, int dim, Rng& rng) {
  check_gamma(gamma, "random_placement");
  constexpr std::int64_t kDen = 1'000'000;
  const auto top = (Frac(1, 1) - gamma).floor_mul(kDen);
  std::vector<Frac> out;
  out.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) out.emplace_back(rng.between(0, top), kDen);
  return out;
}

BoundReport niederreiter_threshold(Frac gamma, std::int64_t q_max, int trials, std::uint64_t seed, Budget& budget) {
  check_gamma(gamma, "niederreiter_threshold");
  check_q(q_max, "niederreiter_threshold");
  if (trials < 1) throw ValidationError("niederreiter_threshold: trials must be >= 1");
  BoundReport rep;
  rep.lemma = "coprime-interval";
  rep.params = {{"gamma", to_string(gamma)},
                {"q_max", std::to_string(q_max)},
                {"trials", std::to_string(trials)},
                {"seed", std::to_string(seed)}};
  rep.note = "rows hold the smallest count over placements against phi(q) gamma";

  Rng rng(derive_seed(seed, 0, 0x4e49));
  std::vector<Frac> alphas;
  for (int t = 0; t < trials; ++t) alphas.push_back(random_placement(gamma, 1, rng).front());

  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q_max));
  const Rational g = gamma.exact();
  std::vector<bool> inside;
  try {
    for (std::int64_t q = 1; q <= q_max; ++q) {
      budget.charge(static_cast<std::uint64_t>(trials) * sieve->squarefree_divisors(q).size(), "coprime-interval");
      std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0;
      for (auto a : alphas) {
        const auto c = count_coprime_interval_mobius(q, a, a + gamma, *sieve);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      Rational main = g * static_cast<unsigned long>(sieve->phi(static_cast<std::uint64_t>(q)));
      main.canonicalize();
      inside.push_back(Rational(lo) * 2 >= main && Rational(hi) * 2 <= main * 3);
      rep.add(q, Rational(lo), main);
    }
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  rep.threshold.reset();
  rep.fitted_constant.reset();
  std::size_t start = inside.size();
  while (start > 0 && inside[start - 1]) --start;
  if (start < inside.size()) {
    rep.threshold = rep.values[start].q;
    double best = rep.values[start].ratio;
    for (std::size_t i = start; i < rep.values.size(); ++i) best = std::min(best, rep.values[i].ratio);
    rep.fitted_constant = best;
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::uint64_t count_primitive_box(int dim, const Box& box) {
  if (dim < 2) throw ValidationError("count_primitive_box: dimension must be >= 2");
  if (box.dim() != dim) throw ValidationError("count_primitive_box: box dimension does not match");
  std::vector<int> coords(static_cast<std::size_t>(dim));
  std::iota(coords.begin(), coords.end(), 0);
  const auto r = ranges_for(coords, box);
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(std::max<std::int64_t>(r.reach(), 1)));
  return to_u64(primitive_in(r, *sieve), "count_primitive_box");
}

BoundReport primitive_box_report(int dim, Frac gamma, std::int64_t q_max, int placements, std::uint64_t seed,
                                 Budget& budget) {
  if (dim < 2) throw ValidationError("primitive_box_report: dimension must be >= 2");
  check_gamma(gamma, "primitive_box_report");
  check_q(q_max, "primitive_box_report");
  if (placements < 1) throw ValidationError("primitive_box_report: placements must be >= 1");
  BoundReport rep;
  rep.lemma = "primitive-box";
  rep.params = {{"D", std::to_string(dim)},
                {"gamma", to_string(gamma)},
                {"q_max", std::to_string(q_max)},
                {"placements", std::to_string(placements)},
                {"seed", std::to_string(seed)}};
  rep.note = "minimum over placements against (gamma q)^D";
  Rng rng(derive_seed(seed, 0, 0x5042));
  std::vector<std::vector<Frac>> alphas;
  for (int t = 0; t < placements; ++t) alphas.push_back(random_placement(gamma, dim, rng));
  shared_sieve(static_cast<std::uint64_t>(q_max));
  const Rational gd = [&] {
    Rational out = 1;
    for (int i = 0; i < dim; ++i) out *= gamma.exact();
    return out;
  }();
  try {
    for (std::int64_t q = 1; q <= q_max; ++q) {
      budget.charge(static_cast<std::uint64_t>(placements) * static_cast<std::uint64_t>(q) * dim, "primitive-box");
      std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
      for (const auto& a : alphas) best = std::min(best, count_primitive_box(dim, Box(a, upper_ends(a, gamma), q)));
      Rational comp = gd * pow_q(q, dim);
      comp.canonicalize();
      rep.add(q, Rational(static_cast<unsigned long>(best)), comp);
    }
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------

ShellProfile shell_profile(const Partition& pi, std::int64_t q, Budget& budget, unsigned threads) {
  check_q(q, "shell_profile");
  const int n = pi.dims().n;
  const auto size = shell_size(n, q);
  const auto ops = size > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n)
                       ? std::numeric_limits<std::uint64_t>::max()
                       : size * static_cast<std::uint64_t>(n);
  budget.require(ops, "shell enumeration");
  budget.charge(ops, "shell enumeration");

  ShellProfile out;
  out.q = q;
  for (int j = 0; j < pi.a(); ++j) out.mixed_parts.push_back(j);
  const auto a = static_cast<std::size_t>(pi.a());

  // Mixed-radix key over gcd tuples, each gcd in [0, q].
  const auto radix = static_cast<std::uint64_t>(q) + 1;
  std::uint64_t key_space = 1;
  for (std::size_t j = 0; j < a; ++j) {
    if (key_space > std::numeric_limits<std::uint64_t>::max() / radix)
      throw ResourceLimitError("shell_profile: gcd key space too large");
    key_space *= radix;
  }
  constexpr std::uint64_t kDenseLimit = 1 << 16;
  const bool dense = key_space <= kDenseLimit;

  const auto& parts = pi.parts();
  const int faces = shell_face_count(n);
  struct Local {
    std::vector<std::uint64_t> dense;
    std::unordered_map<std::uint64_t, std::uint64_t> sparse;
    std::uint64_t in_Q = 0;
  };
  std::vector<Local> locals(static_cast<std::size_t>(faces));
  parallel_for(locals.size(), threads, [&](std::size_t face) {
    auto& loc = locals[face];
    if (dense) loc.dense.assign(key_space, 0);
    for_each_in_face(n, q, static_cast<int>(face), [&](std::span<const std::int64_t> v) {
      for (int j = pi.b(); j < pi.k(); ++j) {
        std::int64_t g = 0;
        for (int i : parts[j].q_coords) g = std::gcd(g, v[i] < 0 ? -v[i] : v[i]);
        if (g != 1) return;
      }
      std::uint64_t key = 0;
      for (std::size_t j = a; j-- > 0;) {
        std::int64_t g = 0;
        for (int i : parts[j].q_coords) g = std::gcd(g, v[i] < 0 ? -v[i] : v[i]);
        key = key * radix + static_cast<std::uint64_t>(g);
      }
      ++loc.in_Q;
      if (dense)
        ++loc.dense[key];
      else
        ++loc.sparse[key];
    });
  });

  std::map<std::uint64_t, std::uint64_t> merged;
  for (auto& loc : locals) {
    out.in_Q += loc.in_Q;
    if (dense) {
      for (std::uint64_t k = 0; k < loc.dense.size(); ++k)
        if (loc.dense[k]) merged[k] += loc.dense[k];
    } else {
      for (auto [k, c] : loc.sparse) merged[k] += c;
    }
  }
  out.shell_vectors = size;
  for (auto [k, count] : merged) {
    auto key = k;
    ShellProfile::Class cls;
    cls.count = count;
    cls.gcds.resize(a);
    for (std::size_t j = 0; j < a; ++j) {
      cls.gcds[j] = static_cast<std::int64_t>(key % radix);
      key /= radix;
    }
    out.classes.push_back(std::move(cls));
  }
  std::sort(out.classes.begin(), out.classes.end(),
            [](const auto& x, const auto& y) { return x.gcds < y.gcds; });
  return out;
}

std::uint64_t counting_sum(const Partition& pi, const ShellProfile& profile, const Box& box) {
  const int m = pi.dims().m;
  if (box.dim() != m)
    throw ValidationError("counting_sum: box has dimension " + std::to_string(box.dim()) + ", expected m = " +
                          std::to_string(m));
  if (box.scale != profile.q)
    throw ValidationError("counting_sum: box scale " + std::to_string(box.scale) + " differs from q = " +
                          std::to_string(profile.q));
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(profile.q));
  const auto& parts = pi.parts();

  // Parts inside 1..m do not depend on q.
  u128 fixed = 1;
  for (int j = pi.a(); j < pi.b(); ++j) {
    fixed *= primitive_in(ranges_for(parts[j].p_coords, box), *sieve);
    if (fixed == 0) return 0;
  }

  std::vector<Ranges> mixed;
  std::vector<std::unordered_map<std::int64_t, u128>> cache(static_cast<std::size_t>(pi.a()));
  for (int j = 0; j < pi.a(); ++j) mixed.push_back(ranges_for(parts[j].p_coords, box));
  auto factor = [&](std::size_t j, std::int64_t g) {
    auto it = cache[j].find(g);
    if (it != cache[j].end()) return it->second;
    const u128 v = g == 0 ? primitive_in(mixed[j], *sieve) : coprime_to_in(mixed[j], g, *sieve);
    cache[j].emplace(g, v);
    return v;
  };

  u128 total = 0;
  for (const auto& cls : profile.classes) {
    u128 term = cls.count;
    for (std::size_t j = 0; j < cls.gcds.size() && term; ++j) term *= factor(j, cls.gcds[j]);
    total += term;
  }
  const u128 limit = std::numeric_limits<std::uint64_t>::max();
  if (total != 0 && fixed > limit / total) throw ResourceLimitError("counting_sum: count exceeds 64 bits");
  return to_u64(total * fixed, "counting_sum");
}

std::uint64_t counting_sum(const Partition& pi, std::int64_t q, const Box& box, Budget& budget, unsigned threads) {
  if (box.dim() != pi.dims().m || box.scale != q)
    return counting_sum(pi, ShellProfile{q, {}, {}, 0, 0}, box);  // throws the validation error
  return counting_sum(pi, shell_profile(pi, q, budget, threads), box);
}

Rational funny_sum(const Partition& pi, const ShellProfile& profile) {
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(profile.q));
  std::vector<std::size_t> single;
  for (int j = 0; j < pi.a(); ++j)
    if (pi.parts()[j].p_coords.size() == 1) single.push_back(static_cast<std::size_t>(j));
  Rational total = 0;
  for (const auto& cls : profile.classes) {
    Rational term(BigInt(static_cast<unsigned long>(cls.count)));
    for (auto j : single) {
      const auto g = cls.gcds[j];
      if (g == 0) {
        term = 0;
        break;
      }
      term *= Rational(BigInt(static_cast<unsigned long>(sieve->phi(static_cast<std::uint64_t>(g)))),
                       BigInt(static_cast<long>(g)));
      term.canonicalize();
    }
    total += term;
  }
  total.canonicalize();
  return total;
}

Rational funny_sum(const Partition& pi, std::int64_t q, Budget& budget, unsigned threads) {
  return funny_sum(pi, shell_profile(pi, q, budget, threads));
}

Rational funny_comparator(const Partition& pi, std::int64_t q) {
  check_q(q, "funny_comparator");
  const int n = pi.dims().n;
  if (has_ell(pi)) return pow_q(q, n - 1);
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q));
  Rational out = pow_q(q, n - 2) * static_cast<unsigned long>(sieve->phi(static_cast<std::uint64_t>(q)));
  out.canonicalize();
  return out;
}

BoundReport funny_report(const Partition& pi, std::int64_t q_max, Budget& budget, unsigned threads) {
  check_q(q_max, "funny_report");
  BoundReport rep;
  rep.lemma = "shell-sum";
  rep.params = {{"m", std::to_string(pi.dims().m)},
                {"n", std::to_string(pi.dims().n)},
                {"partition", pi.to_string()},
                {"q_max", std::to_string(q_max)}};
  rep.note = has_ell(pi) ? "comparator is q^(n-1)" : "comparator is q^(n-2) phi(q)";
  const bool degenerate = std::none_of(pi.parts().begin(), pi.parts().end(),
                                       [](const Partition::Part& part) { return part.p_coords.size() == 1; });
  if (degenerate) rep.note += "; no part has exactly one p-index, so the product is empty and the sum counts Q(pi)";
  shared_sieve(static_cast<std::uint64_t>(q_max));
  try {
    for (std::int64_t q = 1; q <= q_max; ++q)
      rep.add(q, funny_sum(pi, shell_profile(pi, q, budget, threads)), funny_comparator(pi, q));
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  return rep;
}

BoundReport counting_report(const Partition& pi, Frac gamma, std::int64_t q_max, int placements, std::uint64_t seed,
                            Budget& budget, unsigned threads) {
  check_gamma(gamma, "counting_report");
  check_q(q_max, "counting_report");
  if (placements < 1) throw ValidationError("counting_report: placements must be >= 1");
  const int m = pi.dims().m;
  const int n = pi.dims().n;
  BoundReport rep;
  rep.lemma = "partition-count";
  rep.params = {{"m", std::to_string(m)},
                {"n", std::to_string(n)},
                {"partition", pi.to_string()},
                {"gamma", to_string(gamma)},
                {"q_max", std::to_string(q_max)},
                {"placements", std::to_string(placements)},
                {"seed", std::to_string(seed)}};
  const bool ell = has_ell(pi);
  rep.note = ell ? "minimum over placements against gamma^m q^(m+n-1)"
                 : "minimum over placements against gamma^m q^(m+n-2) phi(q)";
  Rng rng(derive_seed(seed, 0, 0x5043));
  std::vector<std::vector<Frac>> alphas;
  for (int t = 0; t < placements; ++t) alphas.push_back(random_placement(gamma, m, rng));
  const auto sieve = shared_sieve(static_cast<std::uint64_t>(q_max));
  Rational gm = 1;
  for (int i = 0; i < m; ++i) gm *= gamma.exact();
  try {
    for (std::int64_t q = 1; q <= q_max; ++q) {
      const auto profile = shell_profile(pi, q, budget, threads);
      budget.charge(static_cast<std::uint64_t>(placements) * (profile.classes.size() + 1), "partition-count");
      std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
      for (const auto& a : alphas) best = std::min(best, counting_sum(pi, profile, Box(a, upper_ends(a, gamma), q)));
      Rational comp = gm * pow_q(q, ell ? m + n - 1 : m + n - 2);
      if (!ell) comp *= static_cast<unsigned long>(sieve->phi(static_cast<std::uint64_t>(q)));
      comp.canonicalize();
      rep.add(q, Rational(to_big(best)), comp);
    }
  } catch (const ResourceLimitError&) {
    rep.truncated = true;
  }
  rep.finalize();
  return rep;
}

}  // namespace kgds
