#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kgds/partition.hpp"

namespace kgds {

enum class PsiFamily { kPower, kLogBoundary, kLogConvergent, kSparseNonmonotone, kTable };

std::string family_name(PsiFamily f);

/// Radius schedule q -> psi(q) >= 0 together with the ball centers.
///
///   power            c q^-tau                       params {c, tau}
///   log_boundary     c (q^n log(q+1))^(-1/m)        params {c}
///   log_convergent   c (q^n log(q+1)^(1+eps))^(-1/m) params {c, eps}
///   sparse           c 2^(-k(n-1)/m) at q = 2^k, 0 elsewhere   params {c}
///   table            values[q-1], 0 beyond the table
///
/// Centers default to `shift` for every q; a table may carry one center per q.
class ApproxFunction {
 public:
  ApproxFunction() = default;

  double operator()(std::int64_t q) const;
  /// Center of the target ball for shell q (length m).
  const std::vector<double>& center(std::int64_t q) const;

  PsiFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& shift() const { return shift_; }
  const std::vector<double>& table() const { return table_; }
  bool has_center_table() const { return !centers_.empty(); }
  const Dims& dims() const { return dims_; }
  /// Non-increasing in q (power with tau >= 0 and the log families).
  bool monotone() const;
  /// "family:p1:p2" with resolved defaults; tables print their source.
  std::string describe() const;

  ApproxFunction with_shift(std::vector<double> shift) const;

 private:
  friend ApproxFunction psi_make(PsiFamily, std::vector<double>, Dims, std::vector<double>);
  friend ApproxFunction psi_table(std::vector<double>, Dims, std::vector<double>, std::vector<std::vector<double>>,
                                  std::string);

  PsiFamily family_ = PsiFamily::kPower;
  std::vector<double> params_;
  std::vector<double> shift_;
  Dims dims_;
  std::vector<double> table_;
  std::vector<std::vector<double>> centers_;
  std::string source_;
};

/// Missing trailing params take defaults: power c=1, tau=n/m; log_boundary c=1;
/// log_convergent c=1, eps=1; sparse c=1. An empty shift means the origin.
/// Throws ValidationError on negative or non-finite params.
ApproxFunction psi_make(PsiFamily family, std::vector<double> params, Dims dims, std::vector<double> shift = {});

/// values[i] = psi(i + 1). `centers`, if nonempty, holds one length-m center per value.
ApproxFunction psi_table(std::vector<double> values, Dims dims, std::vector<double> shift = {},
                         std::vector<std::vector<double>> centers = {}, std::string source = "inline");

/// Reads a table file: one row per q starting at q = 1, the radius first and
/// optionally m center coordinates after it. Blank lines and '#' comments are skipped.
ApproxFunction read_psi_table(const std::string& path, Dims dims, std::vector<double> shift = {});

/// Parses "power:1:2", "log_boundary", "logboundary:0.5", "log_convergent:1:0.5",
/// "sparse" / "sparse_nonmonotone:c" or "table:<path>".
ApproxFunction parse_psi(std::string_view spec, Dims dims, std::vector<double> shift = {});

}  // namespace kgds
