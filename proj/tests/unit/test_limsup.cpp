#include "doctest.h"
#include "kgds/approx.hpp"
#include "kgds/error.hpp"
#include "kgds/limsup.hpp"
#include "kgds/rng.hpp"
#include "oracles.hpp"

using namespace kgds;

namespace {

// x in A(q, B) straight from the definition: try every p in a generous range.
bool brute_in_A(const PointMatrix& x, const std::vector<std::int64_t>& q, const TargetBall& b, bool coprime) {
  const int m = x.m(), n = x.n();
  const auto g = oracle::gcd_all(q);
  for (int i = 0; i < m; ++i) {
    double v = 0;
    for (int j = 0; j < n; ++j) v += static_cast<double>(q[j]) * x(j, i);
    bool ok = false;
    for (std::int64_t p = -200; p <= 200 && !ok; ++p) {
      if (std::abs(v + static_cast<double>(p) - b.center[i]) > b.radius + 1e-12) continue;
      ok = !coprime || std::gcd(oracle::iabs(p), g) == 1;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("translate candidates") {
  CHECK(translate_candidates(0.3, 0.25).empty());
  const auto c = translate_candidates(0.3, 0.35);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == 0);
  CHECK(translate_candidates(0.5, 0.5).size() == 2);
  CHECK(translate_candidates(0.0, 0.0).size() == 0);
}

TEST_CASE("membership against the definition") {
  Rng rng(9);
  for (int t = 0; t < 3000; ++t) {
    const int m = 1 + static_cast<int>(rng.below(2)), n = 1 + static_cast<int>(rng.below(3));
    PointMatrix x(n, m);
    for (auto& e : x.flat()) e = rng.uniform();
    std::vector<std::int64_t> q(static_cast<std::size_t>(n));
    do
      for (auto& v : q) v = rng.between(-6, 6);
    while (oracle::norm(q) == 0);
    std::vector<double> c(static_cast<std::size_t>(m));
    for (auto& v : c) v = rng.uniform(-1, 1);
    const TargetBall ball(c, rng.uniform(0, 0.4));
    const bool a = in_A(x, q, ball);
    CHECK(a == brute_in_A(x, q, ball, false));
    CHECK(in_A_prime(x, q, ball) == brute_in_A(x, q, ball, true));
    const auto pi = Partition::trivial(Dims(m, n));
    const bool api = in_A_pi(x, q, ball, pi);
    if (api) CHECK(a);
    CHECK(in_set(SetKind::kA, nullptr, x, q, ball) == a);
  }
}

TEST_CASE("A_pi with a split partition") {
  // m = 2, n = 2, parts {1,3},{2,4}: gcd(p_1, q_1) = gcd(p_2, q_2) = 1.
  const auto pi = parse_partition(Dims(2, 2), "1,3|2,4");
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    PointMatrix x(2, 2);
    for (auto& e : x.flat()) e = rng.uniform();
    const std::vector<std::int64_t> q = {rng.between(1, 6), rng.between(-6, 6)};
    const TargetBall ball({0.1, -0.2}, 0.3);
    bool want = true;
    for (int i = 0; i < 2; ++i) {
      const double v = static_cast<double>(q[0]) * x(0, i) + static_cast<double>(q[1]) * x(1, i);
      bool ok = false;
      for (std::int64_t p = -50; p <= 50 && !ok; ++p)
        ok = std::abs(v + static_cast<double>(p) - ball.center[i]) <= ball.radius + 1e-12 &&
             std::gcd(oracle::iabs(p), oracle::iabs(q[i])) == 1;
      want = want && ok;
    }
    CHECK(in_A_pi(x, q, ball, pi) == want);
  }
}

TEST_CASE("exact measure of A") {
  const std::vector<std::int64_t> q = {3};
  CHECK(measure_A_exact(q, TargetBall({0.0}, 0.1)) == doctest::Approx(0.2));
  CHECK(measure_A_exact(q, TargetBall({0.0}, 0.7)) == doctest::Approx(1.0));
  CHECK(measure_A_exact(std::vector<std::int64_t>{1, 2}, TargetBall({0.0, 0.0}, 0.25)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(measure_A_exact(std::vector<std::int64_t>{0}, TargetBall({0.0}, 0.1)), ValidationError);
  CHECK_THROWS_AS(TargetBall({0.0}, -1.0), ValidationError);
}

TEST_CASE("Monte Carlo matches the slab measure on a subcube") {
  for (std::int64_t q : {1, 3, -4, 7}) {
    const double y = 0.37, r = 0.08, lo = 0.2, side = 0.5;
    const auto est = mc_measure(SetKind::kA, nullptr, std::vector<std::int64_t>{q}, TargetBall({y}, r),
                                OpenSetU::cube(1, lo, side), 100000, 17);
    const double want = oracle::slab_measure(q, y, r, lo, lo + side);
    CHECK(std::abs(est.mean - want) <= 4.0 * est.std_error + 1e-12);
  }
}

TEST_CASE("Monte Carlo is deterministic across thread counts") {
  const auto pi = Partition::trivial(Dims(1, 2));
  const std::vector<std::int64_t> q = {2, 3};
  const TargetBall b({0.0}, 0.1);
  const auto u = OpenSetU::full(2);
  const auto one = mc_measure(SetKind::kApi, &pi, q, b, u, 40000, 5, 1);
  const auto four = mc_measure(SetKind::kApi, &pi, q, b, u, 40000, 5, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  const auto other = mc_measure(SetKind::kApi, &pi, q, b, u, 40000, 6, 1);
  CHECK(other.mean != one.mean);
}

TEST_CASE("open sets") {
  CHECK(OpenSetU::cube(3, 0.0, 0.5).measure() == doctest::Approx(0.125));
  CHECK(OpenSetU::full(2).measure() == doctest::Approx(1.0));
  CHECK_THROWS_AS(OpenSetU({{{0.0}, {0.6}}, {{0.5}, {1.0}}}), ValidationError);
  CHECK_THROWS_AS(OpenSetU::cube(2, 0.7, 0.5), ValidationError);
  const OpenSetU two({{{0.0}, {0.25}}, {{0.5}, {1.0}}});
  CHECK(two.measure() == doctest::Approx(0.75));
  USampler s(two);
  Rng rng(1);
  double pt[1];
  int in_first = 0;
  for (int i = 0; i < 30000; ++i) {
    s.draw(rng, pt);
    CHECK(((pt[0] >= 0.0 && pt[0] <= 0.25) || (pt[0] >= 0.5 && pt[0] <= 1.0)));
    in_first += pt[0] <= 0.25;
  }
  CHECK(in_first / 30000.0 == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("uniformity ratio near one for A") {
  const auto est = uniformity_ratio(SetKind::kA, nullptr, 5, TargetBall({0.0}, 0.1), OpenSetU::cube(2, 0.0, 0.5),
                                    40000, 3);
  CHECK(std::abs(est.value - 1.0) <= 5.0 * est.std_error + 1e-9);
}

TEST_CASE("quasi-independence ratio") {
  const Dims d(1, 1);
  const auto psi = parse_psi("log_boundary", d, {0.3});
  const auto r = qi_ratio_schedule(SetKind::kA, nullptr, psi, {10, 50}, 2000, 1);
  REQUIRE(r.size() == 2);
  for (const auto& v : r) {
    REQUIRE(v);
    CHECK(*v > 0.0);
    CHECK(*v <= 1.0 + 1e-12);
  }
  CHECK(qi_ratio(SetKind::kA, nullptr, psi, 50, 2000, 1) == doctest::Approx(*r[1]));
  const auto zero = psi_make(PsiFamily::kPower, {0.0}, d);
  CHECK_THROWS_AS(qi_ratio(SetKind::kA, nullptr, zero, 10, 100, 1), UndefinedRatioError);
}
