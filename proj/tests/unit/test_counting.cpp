#include "doctest.h"
#include "kgds/counting.hpp"
#include "kgds/error.hpp"
#include "kgds/sieve.hpp"
#include "oracles.hpp"

using namespace kgds;

namespace {

std::vector<std::vector<int>> raw_parts(const Partition& pi) {
  std::vector<std::vector<int>> out;
  for (const auto& p : pi.parts()) out.push_back(p.indices);
  return out;
}

struct Case {
  Dims dims;
  std::string spec;
  std::int64_t q_max;
};

const std::vector<Case> kCases = {{Dims(1, 1), "1,2", 12},        {Dims(1, 2), "1,2,3", 7},
                                  {Dims(2, 2), "1,3|2,4", 5},     {Dims(2, 2), "1,2|3,4", 5},
                                  {Dims(1, 3), "1,2|3,4", 4},     {Dims(2, 3), "1,2|3,4,5", 3},
                                  {Dims(2, 3), "1,3,5|2,4", 3},   {Dims(1, 3), "1,2,3,4", 4}};

}  // namespace

TEST_CASE("coprime counts in an interval: scan, Moebius and oracle agree") {
  Rng rng(7);
  const auto sieve = build_sieve(400);
  for (std::int64_t q = 1; q <= 400; ++q)
    for (int t = 0; t < 3; ++t) {
      const std::int64_t den = 1 + static_cast<std::int64_t>(rng.below(60));
      std::int64_t a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den)));
      std::int64_t b = a + 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den - a)));
      const Frac alpha(a, den), beta(b, den);
      const auto want = oracle::coprime_interval(q, a, den, b, den);
      CHECK(count_coprime_interval_scan(q, alpha, beta) == want);
      CHECK(count_coprime_interval_mobius(q, alpha, beta, sieve) == want);
      CHECK(count_coprime_interval(q, alpha, beta) == want);
    }
  CHECK(count_coprime_interval(10, Frac(0, 1), Frac(1, 1)) == 4);
  CHECK(count_coprime_interval(1, Frac(0, 1), Frac(1, 1)) == 2);  // p = 0 and p = 1
  CHECK_THROWS_AS(count_coprime_interval(10, Frac(1, 2), Frac(1, 3)), ValidationError);
}

TEST_CASE("primitive points in boxes") {
  Rng rng(3);
  for (int d : {2, 3})
    for (std::int64_t q = 1; q <= (d == 2 ? 30 : 10); ++q) {
      const Frac gamma(1, 2);
      const auto alpha = random_placement(gamma, d, rng);
      std::vector<Frac> beta;
      for (const auto& a : alpha) beta.push_back(a + gamma);
      const Box box(alpha, beta, q);
      std::uint64_t want = 0;
      oracle::for_each_cube(d, q, [&](const oracle::Vec& v) {
        for (int i = 0; i < d; ++i)
          if (v[i] < box.lo(i) || v[i] > box.hi(i)) return;
        want += oracle::gcd_all(v) == 1;
      });
      CHECK(count_primitive_box(d, box) == want);
    }
}

TEST_CASE("placements lie in [0, 1 - gamma]") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t)
    for (const auto& a : random_placement(Frac(1, 5), 3, rng)) {
      CHECK(Frac(0, 1) <= a);
      CHECK(a <= Frac(4, 5));
    }
}

TEST_CASE("counting_sum against enumeration") {
  Rng rng(5);
  for (const auto& c : kCases) {
    const auto pi = parse_partition(c.dims, c.spec);
    const auto parts = raw_parts(pi);
    for (std::int64_t q = 1; q <= c.q_max; ++q)
      for (Frac gamma : {Frac(1, 1), Frac(1, 2)}) {
        const auto alpha = random_placement(gamma, c.dims.m, rng);
        std::vector<Frac> beta;
        for (const auto& a : alpha) beta.push_back(a + gamma);
        const Box box(alpha, beta, q);
        oracle::Vec lo, hi;
        for (int i = 0; i < c.dims.m; ++i) {
          lo.push_back(box.lo(i));
          hi.push_back(box.hi(i));
        }
        INFO(c.spec << " q=" << q);
        CHECK(counting_sum(pi, q, box) == oracle::counting_sum(parts, c.dims.m, c.dims.n, q, lo, hi));
        CHECK(counting_sum(pi, q, box, unlimited_budget(), 3) == counting_sum(pi, q, box));
      }
  }
}

TEST_CASE("counting_sum rejects a mismatched box") {
  const auto pi = Partition::trivial(Dims(1, 2));
  CHECK_THROWS_AS(counting_sum(pi, 5, Box::full(1, 4)), ValidationError);
  CHECK_THROWS_AS(counting_sum(pi, 5, Box::full(2, 5)), ValidationError);
}

TEST_CASE("funny_sum against enumeration") {
  for (const auto& c : kCases) {
    const auto pi = parse_partition(c.dims, c.spec);
    const auto parts = raw_parts(pi);
    for (std::int64_t q = 1; q <= c.q_max; ++q) {
      INFO(c.spec << " q=" << q);
      CHECK(to_double(funny_sum(pi, q)) == doctest::Approx(oracle::funny_sum(parts, c.dims.m, c.dims.n, q)));
    }
  }
}

TEST_CASE("funny_sum examples") {
  CHECK(funny_sum(Partition::trivial(Dims(1, 2)), 1) == Rational(8));
  // No part meets both sides: the product is empty and the sum counts primitive q.
  const auto split = parse_partition(Dims(2, 2), "1,2|3,4");
  for (std::int64_t q = 1; q <= 8; ++q) {
    std::uint64_t prim = 0;
    oracle::for_each_shell(2, q, [&](const oracle::Vec& v) { prim += oracle::gcd_all(v) == 1; });
    CHECK(funny_sum(split, q) == Rational(static_cast<unsigned long>(prim)));
  }
  CHECK(funny_report(split, 5).note.find("product is empty") != std::string::npos);
  CHECK(funny_report(Partition::trivial(Dims(1, 2)), 5).note.find("product is empty") == std::string::npos);
  const auto six = funny_sum(Partition::trivial(Dims(1, 2)), 6);
  CHECK(to_double(six) == doctest::Approx(oracle::funny_sum({{1, 2, 3}}, 1, 2, 6)));
  CHECK(to_double(six) / 6.0 > 0.0);
}

TEST_CASE("shell profiles do not depend on thread count") {
  const auto pi = parse_partition(Dims(2, 3), "1,3,5|2,4");
  const auto a = shell_profile(pi, 9, unlimited_budget(), 1);
  const auto b = shell_profile(pi, 9, unlimited_budget(), 4);
  CHECK(a.shell_vectors == b.shell_vectors);
  CHECK(a.in_Q == b.in_Q);
  REQUIRE(a.classes.size() == b.classes.size());
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    CHECK(a.classes[i].gcds == b.classes[i].gcds);
    CHECK(a.classes[i].count == b.classes[i].count);
  }
  std::uint64_t total = 0;
  for (const auto& cl : a.classes) total += cl.count;
  CHECK(total == a.in_Q);
}

TEST_CASE("budget guards shell enumeration") {
  Budget tiny(100);
  CHECK_THROWS_AS(shell_profile(Partition::trivial(Dims(1, 3)), 50, tiny), ResourceLimitError);
  Budget small(2000);
  const auto rep = funny_report(Partition::trivial(Dims(1, 2)), 1000, small);
  CHECK(rep.truncated);
  CHECK_FALSE(rep.values.empty());
}

TEST_CASE("reports") {
  const auto nie = niederreiter_threshold(Frac(1, 10), 300, 5, 1);
  CHECK(nie.threshold.has_value());
  CHECK(nie.values.size() == 300);
  const auto box = primitive_box_report(2, Frac(1, 2), 60, 3, 1);
  REQUIRE(box.fitted_constant);
  CHECK(*box.fitted_constant > 0.0);
  const auto fr = funny_report(parse_partition(Dims(2, 2), "1,3|2,4"), 40);
  REQUIRE(fr.threshold);
  CHECK(*fr.threshold == 1);
  const auto cr = counting_report(Partition::trivial(Dims(1, 2)), Frac(1, 2), 30, 3, 1);
  REQUIRE(cr.fitted_constant);
  CHECK(*cr.fitted_constant > 0.0);
  // same seed, same rows
  const auto again = counting_report(Partition::trivial(Dims(1, 2)), Frac(1, 2), 30, 3, 1);
  for (std::size_t i = 0; i < cr.values.size(); ++i) CHECK(cr.values[i].exact == again.values[i].exact);
}
