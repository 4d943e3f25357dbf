// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance <path-to-kgds> [criterion ...]
// The lines are also written to acceptance_report.txt in the working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "kgds/approx.hpp"
#include "kgds/arith.hpp"
#include "kgds/counting.hpp"
#include "kgds/experiment.hpp"
#include "kgds/limsup.hpp"
#include "kgds/report.hpp"
#include "kgds/rng.hpp"
#include "kgds/sieve.hpp"
#include "oracles.hpp"

using namespace kgds;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Outcome dirichlet_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t bad = 0;
  for (std::int64_t q = 1; q <= 10000; ++q) {
    const auto c = dirichlet_identity_check(q);
    bad += c.lhs != c.rhs;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {bad == 0 && secs < 10.0, "q <= 10000, mismatches " + std::to_string(bad) + ", " + fmt(secs, 3) + " s"};
}

Outcome mobius_vs_scan() {
  const auto sieve = build_sieve(2000);
  std::uint64_t checks = 0, bad = 0;
  for (std::int64_t lo = 1; lo <= 2000; lo *= 10) {
    const std::int64_t hi = std::min<std::int64_t>(lo * 10 - 1, 2000);
    Rng rng(derive_seed(2024, static_cast<std::uint64_t>(lo)));
    std::vector<std::pair<Frac, Frac>> intervals;
    while (intervals.size() < 100) {
      const std::int64_t den = 1 + static_cast<std::int64_t>(rng.below(1000));
      const auto a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den)));
      const auto b = a + 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den - a)));
      intervals.emplace_back(Frac(a, den), Frac(b, den));
    }
    for (std::int64_t q = lo; q <= hi; ++q)
      for (const auto& [a, b] : intervals) {
        ++checks;
        const auto scan = count_coprime_interval_scan(q, a, b);
        const auto mob = count_coprime_interval_mobius(q, a, b, sieve);
        bad += scan != mob || scan != oracle::coprime_interval(q, a.num, a.den, b.num, b.den);
      }
  }
  return {bad == 0, std::to_string(checks) + " (q, interval) pairs, disagreements " + std::to_string(bad)};
}

Outcome primitive_ball() {
  const auto t0 = std::chrono::steady_clock::now();
  const double count = static_cast<double>(count_primitive_ball(2, 2000));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ratio = count / (4001.0 * 4001.0);
  const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
  const double rel = std::abs(ratio / target - 1.0);
  return {rel < 0.01 && secs < 60.0,
          "ratio " + fmt(ratio, 8) + " vs 6/pi^2 " + fmt(target, 8) + ", rel err " + fmt(rel, 3) + ", " +
              fmt(secs, 3) + " s"};
}

Outcome niederreiter() {
  const auto rep = niederreiter_threshold(Frac(1, 10), 10000, 20, 7);
  if (!rep.threshold) return {false, "no threshold below 10000"};
  return {*rep.threshold < 10000, "gamma = 1/10, 20 placements, Q_gamma = " + std::to_string(*rep.threshold)};
}

Outcome measure_of_A() {
  Rng rng(derive_seed(55, 0));
  int worst_idx = -1;
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const int m = 1 + static_cast<int>(rng.below(2));
    const int n = 1 + static_cast<int>(rng.below(3));
    std::vector<std::int64_t> q(static_cast<std::size_t>(n));
    do
      for (auto& v : q) v = rng.between(-7, 7);
    while (oracle::norm(q) == 0);
    std::vector<double> c(static_cast<std::size_t>(m));
    for (auto& v : c) v = rng.uniform(-1, 1);
    const double r = t == 19 ? 0.6 : rng.uniform(0.01, 0.45);
    const TargetBall ball(c, r);
    const auto est = mc_measure(SetKind::kA, nullptr, q, ball, OpenSetU::full(n * m), 100000,
                                derive_seed(55, static_cast<std::uint64_t>(t) + 1));
    const double exact = std::min(std::pow(2 * r, m), 1.0);
    const double z = est.std_error > 0 ? std::abs(est.mean - exact) / est.std_error
                                       : (std::abs(est.mean - exact) < 1e-12 ? 0.0 : 1e9);
    if (z > worst) {
      worst = z;
      worst_idx = t;
    }
  }
  return {worst <= 4.0, "20 configurations x 1e5 samples, worst |z| = " + fmt(worst, 3) + " (config " +
                            std::to_string(worst_idx) + ")"};
}

struct PartitionCase {
  Dims dims;
  std::string spec;
};

const std::vector<PartitionCase> kLemmaPartitions = {
    {Dims(1, 2), "1,2,3"}, {Dims(2, 2), "1,3|2,4"}, {Dims(2, 3), "1,2|3,4,5"}};

Outcome funny_bound() {
  std::string detail;
  bool ok = true;
  for (const auto& c : kLemmaPartitions) {
    const auto pi = parse_partition(c.dims, c.spec);
    const auto rep = funny_report(pi, 300, unlimited_budget(), 0);
    double inf = rep.values.empty() ? 0.0 : rep.values.front().ratio;
    for (const auto& row : rep.values) inf = std::min(inf, row.ratio);
    const bool here = !rep.truncated && rep.values.size() == 300 && inf > 0.0;
    ok = ok && here;
    detail += (detail.empty() ? "" : "; ") + c.spec + " (" + (has_ell(pi) ? "q^(n-1)" : "q^(n-2) phi(q)") +
              ") inf " + fmt(inf, 4);
  }
  return {ok, detail};
}

Outcome counting_bound() {
  std::string detail;
  bool ok = true;
  for (const auto& c : kLemmaPartitions) {
    const auto pi = parse_partition(c.dims, c.spec);
    if (!has_ell(pi)) continue;
    for (Frac gamma : {Frac(1, 1), Frac(1, 2)}) {
      const auto rep = counting_report(pi, gamma, 200, 4, 11, unlimited_budget(), 0);
      const bool here = !rep.truncated && rep.threshold && rep.fitted_constant && *rep.fitted_constant > 0.0;
      ok = ok && here;
      detail += (detail.empty() ? "" : "; ") + c.spec + " gamma " + to_string(gamma) + ": Q_gamma " +
                (rep.threshold ? std::to_string(*rep.threshold) : "none") + " inf " +
                (rep.fitted_constant ? fmt(*rep.fitted_constant, 4) : "none");
    }
  }
  return {ok, detail};
}

Outcome uniformity() {
  const Dims d(1, 3);
  const auto pi = Partition::trivial(d);
  const auto u = OpenSetU::cube(3, 0.25, 0.5);
  const TargetBall ball({0.0}, 0.05);
  double floor_pi = 1e9, floor_prime = 1e9, worst_se = 0;
  for (std::int64_t q = 20; q <= 40; ++q) {
    const auto a = uniformity_ratio(SetKind::kApi, &pi, q, ball, u, 100000, derive_seed(88, q, 1), 0);
    const auto b = uniformity_ratio(SetKind::kAprime, nullptr, q, ball, u, 100000, derive_seed(88, q, 2), 0);
    floor_pi = std::min(floor_pi, a.value);
    floor_prime = std::min(floor_prime, b.value);
    worst_se = std::max({worst_se, a.std_error, b.std_error});
  }
  const double floor = std::min(floor_pi, floor_prime);
  return {floor > 5.0 * worst_se, "|U| = 1/8, q in [20, 40], floor A_pi " + fmt(floor_pi, 4) + ", A' " +
                                      fmt(floor_prime, 4) + " (max std error " + fmt(worst_se, 2) + ")"};
}

Outcome quasi_independence() {
  const Dims d(1, 3);
  const auto pi = Partition::trivial(d);
  const auto psi = parse_psi("log_boundary", d, {0.0});
  const auto r = qi_ratio_schedule(SetKind::kApi, &pi, psi, {10, 20, 30}, 600, 31, 0);
  double mx = 0;
  std::string vals;
  for (const auto& v : r) {
    if (!v || !(*v > 0.0)) return {false, "ratio undefined or zero"};
    mx = std::max(mx, *v);
    vals += (vals.empty() ? "" : ", ") + fmt(*v, 4);
  }
  return {r.back().value() >= 0.5 * mx, "Q = 10, 20, 30: " + vals};
}

Outcome dichotomy() {
  const auto t0 = std::chrono::steady_clock::now();
  DichotomyConfig conv;
  conv.dims = Dims(1, 2);
  conv.psi = parse_psi("power:1:3", conv.dims);  // q^-(n+1)/m
  conv.schedule = {500, 1000};
  conv.q_max = 1000;
  conv.x_samples = 200;
  conv.seed = 101;
  const auto a = run_dichotomy(conv, unlimited_budget(), 0);
  const double quiet = 1.0 - a.summary.back().frac_x_with_new_hits;

  DichotomyConfig div;
  div.dims = Dims(1, 2);
  div.mode = CountMode::kPartition;
  div.partition = Partition::trivial(div.dims);
  div.psi = parse_psi("log_boundary", div.dims);
  div.schedule = {10, 100, 1000};  // windows [1,10], (10,100], (100,1000]
  div.q_max = 1000;
  div.x_samples = 200;
  div.seed = 202;
  const auto b = run_dichotomy(div, unlimited_budget(), 0);
  double worst = 1.0;
  for (const auto& w : b.summary) worst = std::min(worst, w.frac_x_with_new_hits);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {quiet >= 0.90 && worst >= 0.95 && secs < 600.0,
          "convergent: " + fmt(100 * quiet, 4) + "% of x quiet on (500, 1000]; divergent: min " +
              fmt(100 * worst, 4) + "% of x hit per decade window; " + fmt(secs, 3) + " s"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const auto dir = std::filesystem::temp_directory_path() / ("kgds_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::string> commands = {
      "run --m 1 --n 2 --psi log_boundary --mode partition --partition 1,2,3 --q-max 200 --x-samples 40 --seed 5",
      "measure --set all --m 2 --n 2 --q 3,-2 --radius 0.2 --center 0.1,0.4 --partition 1,3|2,4 --samples 50000 "
      "--seed 6",
      "qi --set A_prime --m 1 --n 2 --psi log_boundary --schedule 5,10 --samples 500 --seed 7",
      "lemma counting --m 1 --n 2 --q-max 25 --gamma 1/2 --seed 8",
      "series --psi log_convergent:1:0.5 --m 1 --n 2 --q-max 2000 --format json",
  };
  std::size_t identical = 0, total = 0;
  std::string failing;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::set<std::string> outputs;
    for (const char* threads : {"1", "8"})
      for (int rep = 0; rep < 2; ++rep) {
        const auto out = dir / ("c" + std::to_string(c) + "_t" + threads + "_" + std::to_string(rep) + ".out");
        std::string cmd = "'" + cli + "' " + commands[c] + " --threads " + threads + " --out '" + out.string() + "'";
        // quote the partition argument for the shell
        const auto bar = cmd.find("1,3|2,4");
        if (bar != std::string::npos) cmd.replace(bar, 7, "'1,3|2,4'");
        if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + commands[c]};
        std::string content = slurp(out);
        const auto side = out.parent_path() / (out.stem().string() + ".summary.csv");
        if (std::filesystem::exists(side)) content += "\n--\n" + slurp(side);
        outputs.insert(content);
      }
    ++total;
    if (outputs.size() == 1)
      ++identical;
    else
      failing += " " + std::to_string(c);
  }
  std::filesystem::remove_all(dir);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " commands byte-identical over 2 runs x threads {1, 8}" +
                                  (failing.empty() ? "" : "; differing:" + failing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dirichlet-identity", dirichlet_identity},
      {"mobius-vs-scan", mobius_vs_scan},
      {"primitive-ball-density", primitive_ball},
      {"niederreiter-window", niederreiter},
      {"measure-of-A", measure_of_A},
      {"shell-sum-bound", funny_bound},
      {"partition-count-bound", counting_bound},
      {"uniformity-floor", uniformity},
      {"quasi-independence", quasi_independence},
      {"dichotomy", dichotomy},
      {"determinism", [&] { return determinism(cli); }},
  };
  std::ofstream report("acceptance_report.txt");
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::ostringstream line;
    line << (o.pass ? "PASS " : "FAIL ") << id << " " << criteria[i].first << ": " << o.detail << "\n";
    std::cout << line.str() << std::flush;
    report << line.str() << std::flush;
  }
  return failures ? 1 : 0;
}
