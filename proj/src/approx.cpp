#include "kgds/approx.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kgds/error.hpp"

namespace kgds {

namespace {

double parse_real(std::string_view tok, std::string_view what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ValidationError(std::string(what) + ": bad number '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_shift(std::vector<double>& shift, const Dims& dims) {
  if (shift.empty()) shift.assign(static_cast<std::size_t>(dims.m), 0.0);
  if (static_cast<int>(shift.size()) != dims.m)
    throw ValidationError("shift y must have m = " + std::to_string(dims.m) + " coordinates, got " +
                          std::to_string(shift.size()));
  for (double v : shift)
    if (!std::isfinite(v)) throw ValidationError("shift y must be finite");
}

}  // namespace

std::string family_name(PsiFamily f) {
  switch (f) {
    case PsiFamily::kPower: return "power";
    case PsiFamily::kLogBoundary: return "log_boundary";
    case PsiFamily::kLogConvergent: return "log_convergent";
    case PsiFamily::kSparseNonmonotone: return "sparse_nonmonotone";
    case PsiFamily::kTable: return "table";
  }
  return "?";
}

double ApproxFunction::operator()(std::int64_t q) const {
  if (q < 1) return 0.0;
  const double m = dims_.m, n = dims_.n;
  const double x = static_cast<double>(q);
  switch (family_) {
    case PsiFamily::kPower:
      return params_[0] * std::pow(x, -params_[1]);
    case PsiFamily::kLogBoundary:
      return params_[0] * std::pow(std::pow(x, n) * std::log(x + 1.0), -1.0 / m);
    case PsiFamily::kLogConvergent:
      return params_[0] * std::pow(std::pow(x, n) * std::pow(std::log(x + 1.0), 1.0 + params_[1]), -1.0 / m);
    case PsiFamily::kSparseNonmonotone: {
      if ((q & (q - 1)) != 0) return 0.0;
      const int k = std::countr_zero(static_cast<std::uint64_t>(q));
      return params_[0] * std::exp2(-k * (n - 1.0) / m);
    }
    case PsiFamily::kTable:
      return static_cast<std::size_t>(q) <= table_.size() ? table_[static_cast<std::size_t>(q) - 1] : 0.0;
  }
  return 0.0;
}

const std::vector<double>& ApproxFunction::center(std::int64_t q) const {
  if (!centers_.empty() && q >= 1 && static_cast<std::size_t>(q) <= centers_.size())
    return centers_[static_cast<std::size_t>(q) - 1];
  return shift_;
}

bool ApproxFunction::monotone() const {
  switch (family_) {
    case PsiFamily::kPower: return params_[1] >= 0.0;
    case PsiFamily::kLogBoundary:
    case PsiFamily::kLogConvergent: return true;
    case PsiFamily::kSparseNonmonotone: return false;
    case PsiFamily::kTable:
      for (std::size_t i = 1; i < table_.size(); ++i)
        if (table_[i] > table_[i - 1]) return false;
      return true;
  }
  return false;
}

std::string ApproxFunction::describe() const {
  if (family_ == PsiFamily::kTable) return "table:" + source_;
  std::string s = family_name(family_);
  for (double p : params_) s += ":" + fmt(p);
  return s;
}

ApproxFunction ApproxFunction::with_shift(std::vector<double> shift) const {
  ApproxFunction out = *this;
  check_shift(shift, dims_);
  out.shift_ = std::move(shift);
  return out;
}

ApproxFunction psi_make(PsiFamily family, std::vector<double> params, Dims dims, std::vector<double> shift) {
  if (family == PsiFamily::kTable) throw ValidationError("psi_make: use psi_table for the table family");
  std::vector<double> defaults;
  switch (family) {
    case PsiFamily::kPower: defaults = {1.0, static_cast<double>(dims.n) / dims.m}; break;
    case PsiFamily::kLogConvergent: defaults = {1.0, 1.0}; break;
    default: defaults = {1.0}; break;
  }
  if (params.size() > defaults.size())
    throw ValidationError("psi family " + family_name(family) + " takes at most " + std::to_string(defaults.size()) +
                          " parameters, got " + std::to_string(params.size()));
  for (std::size_t i = params.size(); i < defaults.size(); ++i) params.push_back(defaults[i]);
  for (double p : params)
    if (!std::isfinite(p) || p < 0.0)
      throw ValidationError("psi family " + family_name(family) + " needs finite nonnegative parameters");
  if (family == PsiFamily::kLogConvergent && !(params[1] > 0.0))
    throw ValidationError("log_convergent needs eps > 0");
  check_shift(shift, dims);
  ApproxFunction f;
  f.family_ = family;
  f.params_ = std::move(params);
  f.shift_ = std::move(shift);
  f.dims_ = dims;
  return f;
}

ApproxFunction psi_table(std::vector<double> values, Dims dims, std::vector<double> shift,
                         std::vector<std::vector<double>> centers, std::string source) {
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("psi table values must be finite and nonnegative");
  if (!centers.empty()) {
    if (centers.size() != values.size())
      throw ValidationError("psi table: center rows must match value rows");
    for (const auto& c : centers)
      if (static_cast<int>(c.size()) != dims.m)
        throw ValidationError("psi table: each center needs m = " + std::to_string(dims.m) + " coordinates");
  }
  check_shift(shift, dims);
  ApproxFunction f;
  f.family_ = PsiFamily::kTable;
  f.table_ = std::move(values);
  f.centers_ = std::move(centers);
  f.shift_ = std::move(shift);
  f.dims_ = dims;
  f.source_ = std::move(source);
  return f;
}

ApproxFunction read_psi_table(const std::string& path, Dims dims, std::vector<double> shift) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open psi table '" + path + "'");
  std::vector<double> values;
  std::vector<std::vector<double>> centers;
  std::string line;
  int lineno = 0;
  bool with_centers = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    std::vector<double> cols;
    std::string tok;
    while (row >> tok) cols.push_back(parse_real(tok, path + ":" + std::to_string(lineno)));
    if (cols.empty()) continue;
    if (values.empty()) with_centers = cols.size() > 1;
    const std::size_t want = with_centers ? static_cast<std::size_t>(dims.m) + 1 : 1;
    if (cols.size() != want)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(want) +
                            " columns, got " + std::to_string(cols.size()));
    values.push_back(cols[0]);
    if (with_centers) centers.emplace_back(cols.begin() + 1, cols.end());
  }
  if (in.bad()) throw IoError("error reading psi table '" + path + "'");
  return psi_table(std::move(values), dims, std::move(shift), std::move(centers), path);
}

ApproxFunction parse_psi(std::string_view spec, Dims dims, std::vector<double> shift) {
  const auto fields = split(spec, ':');
  const auto name = fields.front();
  if (name == "table") {
    if (fields.size() < 2 || spec.size() <= 6) throw ValidationError("psi table needs a path: table:<path>");
    return read_psi_table(std::string(spec.substr(6)), dims, std::move(shift));
  }
  PsiFamily family;
  if (name == "power")
    family = PsiFamily::kPower;
  else if (name == "log_boundary" || name == "logboundary")
    family = PsiFamily::kLogBoundary;
  else if (name == "log_convergent" || name == "logconvergent")
    family = PsiFamily::kLogConvergent;
  else if (name == "sparse" || name == "sparse_nonmonotone")
    family = PsiFamily::kSparseNonmonotone;
  else
    throw ValidationError("unknown psi family '" + std::string(name) +
                          "'; expected power, log_boundary, log_convergent, sparse_nonmonotone or table");
  std::vector<double> params;
  for (std::size_t i = 1; i < fields.size(); ++i) params.push_back(parse_real(fields[i], "psi " + std::string(spec)));
  return psi_make(family, std::move(params), dims, std::move(shift));
}

}  // namespace kgds
