#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgds/approx.hpp"
#include "kgds/budget.hpp"
#include "kgds/partition.hpp"

namespace kgds {

// ---------------------------------------------------------------------------
// Q schedules
// ---------------------------------------------------------------------------

/// 1, 2, 5, 10, 20, 50, ... up to q_max, with q_max appended.
std::vector<std::int64_t> schedule_125(std::int64_t q_max);
/// 10, 100, 1000, ... below q_max, with q_max appended.
std::vector<std::int64_t> schedule_decades(std::int64_t q_max);
/// "10,100,1000"; must be positive and strictly increasing.
std::vector<std::int64_t> parse_schedule(const std::string& text);

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

enum class Verdict { kDiverging, kConverging, kInconclusive };
const char* verdict_name(Verdict v);

/// Last-decade test. With d1 = S(Q) - S(Q/10) and d0 = S(Q/10) - S(Q/100),
/// the ratio d1/d0 is near 1 for a c/q tail and near 10^-s for a q^-(1+s) tail.
/// Q < 100 is always inconclusive; a sum that stays 0 converges.
struct VerdictRule {
  double converge_below = 0.25;
  double diverge_at_least = 0.5;
};

Verdict decide_verdict(double s_q, double s_q10, double s_q100, std::int64_t Q, const VerdictRule& rule = {});

/// Partial sums at each scheduled Q.
struct PartialSums {
  std::vector<std::int64_t> Q;
  std::vector<double> S;
  std::vector<Verdict> verdicts;  // the test applied at each scheduled Q
  Verdict verdict = Verdict::kInconclusive;
  double tail_ratio = 0.0;  // d1/d0, 0 when undefined
};

/// sum_{q <= Q} q^(n-1) psi(q)^m.
PartialSums series_kg(const ApproxFunction& psi, std::int64_t Q, const VerdictRule& rule = {},
                      Budget& budget = unlimited_budget());

/// sum over q in Z^n, 0 < |q| <= Q, of (phi(g) psi(|q|) / g)^m, g = gcd(q).
/// The shell |q| = t holds prim(t/d) vectors of gcd d for each d | t.
PartialSums series_ds(const ApproxFunction& psi, std::int64_t Q, const VerdictRule& rule = {},
                      Budget& budget = unlimited_budget());

struct SeriesReport {
  std::string psi;
  Dims dims;
  std::vector<std::int64_t> Q;
  std::vector<double> S_kg;
  std::vector<double> S_ds;
  std::vector<Verdict> row_verdict_kg;
  std::vector<Verdict> row_verdict_ds;
  Verdict verdict_kg = Verdict::kInconclusive;
  Verdict verdict_ds = Verdict::kInconclusive;
  double tail_ratio_kg = 0.0;
  double tail_ratio_ds = 0.0;
};

/// Both series on the 1-2-5 schedule up to Q.
SeriesReport series_report(const ApproxFunction& psi, std::int64_t Q, const VerdictRule& rule = {},
                           Budget& budget = unlimited_budget());

// ---------------------------------------------------------------------------
// Dichotomy runs
// ---------------------------------------------------------------------------

enum class CountMode { kPlain, kPartition, kCoprime };
const char* mode_name(CountMode m);

struct DichotomyConfig {
  Dims dims;
  CountMode mode = CountMode::kPlain;
  std::optional<Partition> partition;  // required for kPartition, forbidden otherwise
  ApproxFunction psi;
  std::optional<std::vector<double>> y;  // drawn from the seed when unset
  std::uint64_t seed = 0;
  std::vector<std::int64_t> schedule;  // empty means decades up to q_max
  std::int64_t q_max = 0;              // used when schedule is empty
  std::uint64_t x_samples = 100;
  bool allow_conjecture = false;

  /// Throws ValidationError. Fills y and schedule.
  void resolve();
};

struct WindowSummary {
  std::int64_t Q = 0;
  double frac_x_with_new_hits = 0.0;
  double median_hits = 0.0;
};

/// Hits are distinct (p, q) with 0 < |q| <= Q and |q x - p - y_|q|| < psi(|q|)
/// in every coordinate. hits_plain ignores coprimality; hits_constrained
/// applies the run's mode and equals hits_plain in plain mode.
struct ExperimentRun {
  DichotomyConfig config;
  std::vector<std::vector<std::uint64_t>> hits_plain;        // [x][k]
  std::vector<std::vector<std::uint64_t>> hits_constrained;  // [x][k]
  std::vector<WindowSummary> summary;
  bool in_hypothesis = true;
  std::string hypothesis_note;
  std::uint64_t operations = 0;
};

ExperimentRun run_dichotomy(DichotomyConfig config, Budget& budget = unlimited_budget(), unsigned threads = 1);

/// x sample `index` of a run with this seed (row-major n x m, entries in [0,1)).
std::vector<double> dichotomy_point(std::uint64_t seed, std::uint64_t index, const Dims& dims);

}  // namespace kgds
