#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kgds/arith.hpp"
#include "kgds/counting.hpp"
#include "kgds/error.hpp"
#include "kgds/experiment.hpp"
#include "kgds/limsup.hpp"
#include "kgds/report.hpp"
#include "kgds/sieve.hpp"

namespace kgds::cli {

namespace {

const std::vector<std::string> kSubcommands = {"sieve", "lemma", "measure", "qi", "series", "run"};
const std::vector<std::string> kLemmas = {"primitive-ball", "coprime-shell", "gcd-sum",  "dirichlet",
                                          "niederreiter",   "primitive-box", "funny", "counting"};

// --- argument helpers -------------------------------------------------------

std::string join(const std::vector<std::string>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    out.push_back(tok);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split_list(text)) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size() || !std::isfinite(v))
      throw ValidationError(what + ": bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  for (const auto& tok : split_list(text)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw ValidationError(what + ": bad integer '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string reals_text(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(format_real(x));
  return join(s);
}

std::string ints_text(const std::vector<std::int64_t>& v) {
  std::vector<std::string> s;
  for (auto x : v) s.push_back(std::to_string(x));
  return join(s);
}

SetKind parse_set(const std::string& name) {
  if (name == "A") return SetKind::kA;
  if (name == "A_pi" || name == "Api" || name == "A-pi") return SetKind::kApi;
  if (name == "A_prime" || name == "Aprime" || name == "A-prime" || name == "A'") return SetKind::kAprime;
  throw ValidationError("unknown set '" + name + "'; expected A, A_pi or A_prime");
}

CountMode parse_mode(const std::string& name) {
  if (name == "plain") return CountMode::kPlain;
  if (name == "partition") return CountMode::kPartition;
  if (name == "coprime-per-coordinate" || name == "coprime") return CountMode::kCoprime;
  throw ValidationError("unknown mode '" + name + "'; expected plain, partition or coprime-per-coordinate");
}

std::uint64_t parse_budget(double b) {
  if (!(b >= 1.0) || b > 1.8e19 || std::floor(b) != b)
    throw ValidationError("budget must be a positive whole number of operations");
  return static_cast<std::uint64_t>(b);
}

// --- config files -------------------------------------------------------------

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned() || v.is_number_float()) return v.dump();
  throw ValidationError("config key '" + key + "' must be a string, number, boolean or list");
}

// Turns {"subcommand": ..., "key": value} into argv tokens. Lists become
// comma-joined values, true becomes a bare flag, false is dropped.
std::vector<std::string> config_tokens(const std::string& path, std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config file '" + path + "' must hold a JSON object");
  std::vector<std::string> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& key = it.key();
    const auto& v = it.value();
    if (key == "subcommand") {
      if (!v.is_string()) throw ValidationError("config key 'subcommand' must be a string");
      subcommand = v.get<std::string>();
      continue;
    }
    if (key == "config") throw ValidationError("config files cannot nest --config");
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back("--" + key);
      continue;
    }
    std::string value;
    if (v.is_array()) {
      std::vector<std::string> parts;
      for (const auto& e : v) parts.push_back(json_scalar(e, key));
      value = join(parts);
    } else {
      value = json_scalar(v, key);
    }
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

// Splices config-file values in right after the subcommand so that flags on
// the command line, which come later, win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a path");
      path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (!path) return args;
  std::string file_sub;
  auto tokens = config_tokens(*path, file_sub);
  std::vector<std::string> out{args.front()};
  auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  if (sub == rest.end()) {
    if (file_sub.empty()) throw ValidationError("no subcommand on the command line or in the config file");
    out.push_back(file_sub);
    out.insert(out.end(), tokens.begin(), tokens.end());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  out.insert(out.end(), rest.begin(), sub + 1);
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), sub + 1, rest.end());
  return out;
}

// --- shared options -------------------------------------------------------

struct Output {
  std::string out = "-";
  std::string format = "csv";
  unsigned threads = 0;
};

void add_output(CLI::App* sub, Output& o) {
  sub->add_option("--out,-o", o.out, "Output path, '-' for stdout")->capture_default_str();
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
}

struct Shape {
  int m = 1;
  int n = 1;
  std::string partition;
};

void add_shape(CLI::App* sub, Shape& s) {
  sub->add_option("--m", s.m, "Number of linear forms")->capture_default_str();
  sub->add_option("--n", s.n, "Number of variables")->capture_default_str();
  sub->add_option("--partition", s.partition, "Partition of 1..m+n, e.g. \"1,3|2,4\"");
}

Partition shape_partition(const Shape& s) {
  const Dims dims(s.m, s.n);
  return s.partition.empty() ? Partition::trivial(dims) : parse_partition(dims, s.partition);
}

// Opens every output path before the work starts so that I/O problems
// surface before a long computation rather than after it.
void probe_paths(const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    std::ofstream f(p, std::ios::app);
    if (!f) throw IoError("cannot open '" + p + "' for writing");
  }
}

void finish(const Document& doc, const Output& o) { emit_report(doc, parse_format(o.format), o.out); }

// --- subcommands ----------------------------------------------------------

struct SieveArgs {
  std::uint64_t limit = 100;
  std::uint64_t from = 1;
  std::uint64_t to = 0;
  Output out;
};

int cmd_sieve(const SieveArgs& a) {
  if (a.limit < 1) throw ValidationError("--limit must be >= 1");
  const auto to = a.to == 0 ? a.limit : a.to;
  if (a.from < 1 || a.from > to || to > a.limit) throw ValidationError("need 1 <= --from <= --to <= --limit");
  const Entries cfg = {{"subcommand", "sieve"},
                       {"limit", std::to_string(a.limit)},
                       {"from", std::to_string(a.from)},
                       {"to", std::to_string(to)},
                       {"seed", "none"},
                       {"format", a.out.format}};
  parse_format(a.out.format);
  const auto sieve = build_sieve(a.limit);
  finish(sieve_document(sieve, a.from, to, cfg), a.out);
  return 0;
}

struct LemmaArgs {
  std::string name;
  int d = 2;
  std::int64_t q_max = 100;
  std::string gcd_mode = "plain";
  std::string gamma;
  int trials = 0;
  Shape shape;
  std::uint64_t seed = 1;
  double budget = 1e9;
  Output out;
};

int cmd_lemma(const LemmaArgs& a) {
  if (std::find(kLemmas.begin(), kLemmas.end(), a.name) == kLemmas.end())
    throw ValidationError("unknown lemma '" + a.name + "'; valid names: " + join(kLemmas, ", "));
  if (a.q_max < 1) throw ValidationError("--q-max must be >= 1");
  Budget budget(parse_budget(a.budget));
  parse_format(a.out.format);
  Entries cfg = {{"subcommand", "lemma"}, {"name", a.name}, {"q-max", std::to_string(a.q_max)}};
  const bool dim_lemma = a.name == "primitive-ball" || a.name == "coprime-shell" || a.name == "gcd-sum" ||
                         a.name == "primitive-box";
  const bool part_lemma = a.name == "funny" || a.name == "counting";
  const bool gamma_lemma = a.name == "niederreiter" || a.name == "primitive-box" || a.name == "counting";
  if (dim_lemma) cfg.emplace_back("d", std::to_string(a.d));
  GcdMode mode = GcdMode::kPlain;
  if (a.name == "gcd-sum") {
    if (a.gcd_mode == "plain")
      mode = GcdMode::kPlain;
    else if (a.gcd_mode == "coprime_to_q" || a.gcd_mode == "coprime-to-q")
      mode = GcdMode::kCoprimeToQ;
    else
      throw ValidationError("--gcd-mode must be plain or coprime_to_q");
    cfg.emplace_back("gcd-mode", mode == GcdMode::kPlain ? "plain" : "coprime_to_q");
  }
  std::optional<Partition> pi;
  if (part_lemma) {
    pi = shape_partition(a.shape);
    cfg.emplace_back("m", std::to_string(a.shape.m));
    cfg.emplace_back("n", std::to_string(a.shape.n));
    cfg.emplace_back("partition", pi->to_string());
  }
  Frac gamma(1, 1);
  int trials = a.trials;
  if (gamma_lemma) {
    const std::string fallback = a.name == "niederreiter" ? "1/10" : (a.name == "primitive-box" ? "1/2" : "1");
    gamma = parse_frac(a.gamma.empty() ? fallback : a.gamma);
    if (!(Frac(0, 1) < gamma) || Frac(1, 1) < gamma) throw ValidationError("--gamma must lie in (0, 1]");
    if (trials == 0) trials = a.name == "niederreiter" ? 20 : 4;
    if (trials < 1) throw ValidationError("--trials must be >= 1");
    cfg.emplace_back("gamma", to_string(gamma));
    cfg.emplace_back("trials", std::to_string(trials));
  }
  if ((a.name == "primitive-ball" || a.name == "primitive-box") && a.d < 2)
    throw ValidationError("--d must be >= 2 for " + a.name);
  if (dim_lemma && (a.d < 1 || a.d > 16)) throw ValidationError("--d must lie in 1..16");
  cfg.emplace_back("seed", std::to_string(a.seed));
  cfg.emplace_back("budget", std::to_string(budget.limit()));
  cfg.emplace_back("format", a.out.format);
  probe_paths(report_paths(Document{{}, {}, {Table{}}}, parse_format(a.out.format), a.out.out));

  if (a.name == "dirichlet") {
    budget.charge(static_cast<std::uint64_t>(a.q_max) * 16, "dirichlet");
    auto doc = dirichlet_document(dirichlet_table(a.q_max), cfg);
    doc.meta.emplace_back("budget_used", std::to_string(budget.used()));
    finish(doc, a.out);
    return 0;
  }
  BoundReport rep;
  const unsigned threads = a.out.threads;
  if (a.name == "primitive-ball") rep = primitive_ball_report(a.d, a.q_max, budget);
  if (a.name == "coprime-shell") rep = coprime_shell_report(a.d, a.q_max, budget);
  if (a.name == "gcd-sum") rep = gcd_sum_report(a.d, a.q_max, mode, budget);
  if (a.name == "niederreiter") rep = niederreiter_threshold(gamma, a.q_max, trials, a.seed, budget);
  if (a.name == "primitive-box") rep = primitive_box_report(a.d, gamma, a.q_max, trials, a.seed, budget);
  if (a.name == "funny") rep = funny_report(*pi, a.q_max, budget, threads);
  if (a.name == "counting") rep = counting_report(*pi, gamma, a.q_max, trials, a.seed, budget, threads);
  auto doc = bound_document(rep, cfg);
  doc.meta.emplace_back("budget_used", std::to_string(budget.used()));
  finish(doc, a.out);
  if (rep.truncated) {
    std::cerr << "kgds: budget of " << budget.limit() << " operations exhausted; output truncated "
              << (rep.values.empty() ? std::string("before the first row")
                                     : "after q = " + std::to_string(rep.values.back().q))
              << "\n";
    return static_cast<int>(ExitCode::kResourceLimit);
  }
  return 0;
}

struct MeasureArgs {
  std::string set = "A";
  Shape shape;
  std::string q;
  double radius = 0.25;
  std::string center;
  double u_lo = 0.0;
  double u_side = 1.0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  Output out;
};

int cmd_measure(const MeasureArgs& a) {
  const Dims dims(a.shape.m, a.shape.n);
  std::vector<SetKind> kinds;
  if (a.set == "all")
    kinds = {SetKind::kA, SetKind::kApi, SetKind::kAprime};
  else
    kinds = {parse_set(a.set)};
  if (a.q.empty()) throw ValidationError("--q is required, e.g. --q 7 or --q 2,4");
  const auto q = parse_ints(a.q, "--q");
  if (static_cast<int>(q.size()) != dims.n)
    throw ValidationError("--q needs n = " + std::to_string(dims.n) + " coordinates");
  std::vector<double> center =
      a.center.empty() ? std::vector<double>(static_cast<std::size_t>(dims.m), 0.0) : parse_reals(a.center, "--center");
  if (static_cast<int>(center.size()) != dims.m)
    throw ValidationError("--center needs m = " + std::to_string(dims.m) + " coordinates");
  const TargetBall ball(center, a.radius);
  if (!(a.u_lo >= 0.0 && a.u_side > 0.0 && a.u_lo + a.u_side <= 1.0))
    throw ValidationError("U = [u-lo, u-lo + u-side]^(nm) must lie in the unit cube");
  const auto u = OpenSetU::cube(dims.n * dims.m, a.u_lo, a.u_side);
  if (a.samples < 1) throw ValidationError("--samples must be >= 1");
  const auto pi = shape_partition(a.shape);
  parse_format(a.out.format);
  measure_A_exact(q, ball);  // rejects q = 0
  const Entries cfg = {{"subcommand", "measure"},
                       {"set", a.set},
                       {"m", std::to_string(dims.m)},
                       {"n", std::to_string(dims.n)},
                       {"partition", pi.to_string()},
                       {"q", ints_text(q)},
                       {"radius", format_real(a.radius)},
                       {"center", reals_text(center)},
                       {"u-lo", format_real(a.u_lo)},
                       {"u-side", format_real(a.u_side)},
                       {"samples", std::to_string(a.samples)},
                       {"seed", std::to_string(a.seed)},
                       {"format", a.out.format}};
  probe_paths(report_paths(Document{{}, {}, {Table{}}}, parse_format(a.out.format), a.out.out));
  std::vector<MeasureRow> rows;
  for (auto k : kinds) {
    MeasureRow row;
    row.set = set_kind_name(k);
    row.estimate = mc_measure(k, &pi, q, ball, u, a.samples, a.seed, a.out.threads);
    if (k == SetKind::kA && a.u_lo == 0.0 && a.u_side == 1.0) row.exact = measure_A_exact(q, ball);
    rows.push_back(std::move(row));
  }
  finish(measure_document(rows, cfg), a.out);
  return 0;
}

struct QiArgs {
  std::string set = "A";
  Shape shape;
  std::string psi = "log_boundary";
  std::string y;
  std::int64_t q_max = 0;
  std::string schedule;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  double budget = 1e9;
  Output out;
};

int cmd_qi(const QiArgs& a) {
  const Dims dims(a.shape.m, a.shape.n);
  const auto kind = parse_set(a.set);
  std::vector<double> y = a.y.empty() ? std::vector<double>{} : parse_reals(a.y, "--y");
  const auto psi = parse_psi(a.psi, dims, y);
  std::vector<std::int64_t> schedule;
  if (!a.schedule.empty())
    schedule = parse_schedule(a.schedule);
  else if (a.q_max >= 1)
    schedule = schedule_decades(a.q_max);
  else
    throw ValidationError("qi needs --q-max or --schedule");
  if (a.q_max >= 1 && schedule.back() != a.q_max) throw ValidationError("--schedule must end at --q-max");
  if (a.samples < 1) throw ValidationError("--samples must be >= 1");
  std::optional<Partition> pi;
  if (kind == SetKind::kApi) pi = shape_partition(a.shape);
  Budget budget(parse_budget(a.budget));
  parse_format(a.out.format);
  const auto Q = schedule.back();
  std::uint64_t ball = 1;
  for (int j = 0; j < dims.n; ++j) ball = ball > UINT64_MAX / static_cast<std::uint64_t>(2 * Q + 1) ? UINT64_MAX : ball * static_cast<std::uint64_t>(2 * Q + 1);
  const std::uint64_t cost = ball > UINT64_MAX / a.samples ? UINT64_MAX : ball * a.samples;
  Entries cfg = {{"subcommand", "qi"},
                 {"set", set_kind_name(kind)},
                 {"m", std::to_string(dims.m)},
                 {"n", std::to_string(dims.n)}};
  if (pi) cfg.emplace_back("partition", pi->to_string());
  cfg.insert(cfg.end(), {{"psi", psi.describe()},
                         {"y", reals_text(psi.shift())},
                         {"schedule", ints_text(schedule)},
                         {"samples", std::to_string(a.samples)},
                         {"seed", std::to_string(a.seed)},
                         {"budget", std::to_string(budget.limit())},
                         {"format", a.out.format}});
  budget.charge(cost, "qi enumeration");
  probe_paths(report_paths(Document{{}, {}, {Table{}}}, parse_format(a.out.format), a.out.out));
  const auto ratios = qi_ratio_schedule(kind, pi ? &*pi : nullptr, psi, schedule, a.samples, a.seed, a.out.threads);
  auto doc = qi_document(schedule, ratios, cfg);
  doc.meta.emplace_back("budget_used", std::to_string(budget.used()));
  finish(doc, a.out);
  return 0;
}

struct SeriesArgs {
  Shape shape;
  std::string psi;
  std::string mode = "plain";
  std::int64_t q_max = 0;
  double converge_below = 0.25;
  double diverge_at_least = 0.5;
  double budget = 1e9;
  Output out;
};

int cmd_series(const SeriesArgs& a) {
  const Dims dims(a.shape.m, a.shape.n);
  const auto mode = parse_mode(a.mode);
  if (a.psi.empty()) throw ValidationError("--psi is required, e.g. --psi power:1:2");
  const auto psi = parse_psi(a.psi, dims);
  if (a.q_max < 1) throw ValidationError("--q-max must be >= 1");
  if (!(a.converge_below > 0.0 && a.converge_below <= a.diverge_at_least))
    throw ValidationError("need 0 < --converge-below <= --diverge-at-least");
  if (mode == CountMode::kPartition && a.shape.partition.empty())
    throw ValidationError("mode partition requires --partition");
  if (mode != CountMode::kPartition && !a.shape.partition.empty())
    throw ValidationError("--partition is only valid with --mode partition");
  std::optional<Partition> pi;
  if (mode == CountMode::kPartition) pi = shape_partition(a.shape);
  Budget budget(parse_budget(a.budget));
  parse_format(a.out.format);
  Entries cfg = {{"subcommand", "series"},
                 {"m", std::to_string(dims.m)},
                 {"n", std::to_string(dims.n)},
                 {"mode", mode_name(mode)}};
  if (pi) cfg.emplace_back("partition", pi->to_string());
  cfg.insert(cfg.end(), {{"psi", psi.describe()},
                         {"q-max", std::to_string(a.q_max)},
                         {"converge-below", format_real(a.converge_below)},
                         {"diverge-at-least", format_real(a.diverge_at_least)},
                         {"seed", "none"},
                         {"budget", std::to_string(budget.limit())},
                         {"format", a.out.format}});
  probe_paths(report_paths(Document{{}, {}, {Table{}}}, parse_format(a.out.format), a.out.out));
  const auto rep = series_report(psi, a.q_max, VerdictRule{a.converge_below, a.diverge_at_least}, budget);
  auto doc = series_document(rep, mode, cfg);
  doc.meta.emplace_back("budget_used", std::to_string(budget.used()));
  finish(doc, a.out);
  return 0;
}

struct RunArgs {
  Shape shape;
  std::string mode = "plain";
  std::string psi;
  std::string y;
  std::int64_t q_max = 0;
  std::string schedule;
  std::uint64_t x_samples = 200;
  std::uint64_t seed = 1;
  bool allow_conjecture = false;
  double budget = 1e9;
  Output out;
};

int cmd_run(const RunArgs& a) {
  DichotomyConfig c;
  c.dims = Dims(a.shape.m, a.shape.n);
  c.mode = parse_mode(a.mode);
  if (a.psi.empty()) throw ValidationError("--psi is required, e.g. --psi log_boundary");
  c.psi = parse_psi(a.psi, c.dims);
  if (!a.shape.partition.empty() || c.mode == CountMode::kPartition) {
    if (c.mode != CountMode::kPartition) throw ValidationError("--partition is only valid with --mode partition");
    if (a.shape.partition.empty()) throw ValidationError("mode partition requires --partition");
    c.partition = shape_partition(a.shape);
  }
  if (!a.y.empty()) c.y = parse_reals(a.y, "--y");
  if (!a.schedule.empty()) c.schedule = parse_schedule(a.schedule);
  c.q_max = a.q_max;
  c.x_samples = a.x_samples;
  c.seed = a.seed;
  c.allow_conjecture = a.allow_conjecture;
  c.resolve();
  Budget budget(parse_budget(a.budget));
  const auto fmt = parse_format(a.out.format);
  Entries cfg = {{"subcommand", "run"},
                 {"m", std::to_string(c.dims.m)},
                 {"n", std::to_string(c.dims.n)},
                 {"mode", mode_name(c.mode)}};
  if (c.partition) cfg.emplace_back("partition", c.partition->to_string());
  cfg.insert(cfg.end(), {{"psi", c.psi.describe()},
                         {"y", reals_text(*c.y)},
                         {"schedule", ints_text(c.schedule)},
                         {"q-max", std::to_string(c.q_max)},
                         {"x-samples", std::to_string(c.x_samples)},
                         {"seed", std::to_string(c.seed)},
                         {"allow-conjecture", c.allow_conjecture ? "true" : "false"},
                         {"budget", std::to_string(budget.limit())},
                         {"format", a.out.format}});
  Document shape_doc{{}, {}, {Table{"dichotomy", {}, {}}, Table{"summary", {}, {}}}};
  probe_paths(report_paths(shape_doc, fmt, a.out.out));
  const auto run = run_dichotomy(c, budget, a.out.threads);
  auto doc = run_document(run, cfg);
  doc.meta.emplace_back("budget_used", std::to_string(budget.used()));
  finish(doc, a.out);
  return 0;
}

int dispatch(std::vector<std::string> args) {
  args = expand_config(args);
  CLI::App app{"Counting lemmas, limsup-set measures and dichotomy experiments", "kgds"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.add_option("--config", "JSON file of option values; command-line flags override it");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto configure = [](CLI::App* sub) { sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };

  SieveArgs sieve;
  auto* s = app.add_subcommand("sieve", "Totient, Moebius and smallest prime factor tables");
  configure(s);
  s->add_option("--limit", sieve.limit, "Sieve up to this value")->capture_default_str();
  s->add_option("--from", sieve.from, "First row")->capture_default_str();
  s->add_option("--to", sieve.to, "Last row (default: limit)");
  add_output(s, sieve.out);

  LemmaArgs lemma;
  auto* l = app.add_subcommand("lemma", "Exact sums against their asserted bounds");
  configure(l);
  l->add_option("name,--name", lemma.name, "One of: " + join(kLemmas, ", "))->required();
  l->add_option("--d,--D", lemma.d, "Dimension D")->capture_default_str();
  l->add_option("--q-max", lemma.q_max, "Largest q")->capture_default_str();
  l->add_option("--gcd-mode,--mode", lemma.gcd_mode, "gcd-sum mode: plain or coprime_to_q")->capture_default_str();
  l->add_option("--gamma", lemma.gamma, "Interval or box width, e.g. 1/10");
  l->add_option("--trials,--placements", lemma.trials, "Random placements");
  add_shape(l, lemma.shape);
  l->add_option("--seed", lemma.seed)->capture_default_str();
  l->add_option("--budget", lemma.budget, "Operation budget")->capture_default_str();
  add_output(l, lemma.out);

  MeasureArgs measure;
  auto* me = app.add_subcommand("measure", "Monte Carlo measure of A, A_pi or A_prime inside U");
  configure(me);
  me->add_option("--set", measure.set, "A, A_pi, A_prime or all")->capture_default_str();
  add_shape(me, measure.shape);
  me->add_option("--q", measure.q, "Integer vector q, comma-separated");
  me->add_option("--radius", measure.radius)->capture_default_str();
  me->add_option("--center", measure.center, "Ball center, comma-separated (default 0)");
  me->add_option("--u-lo", measure.u_lo, "U is the cube [u-lo, u-lo + u-side]^(nm)")->capture_default_str();
  me->add_option("--u-side", measure.u_side)->capture_default_str();
  me->add_option("--samples", measure.samples)->capture_default_str();
  me->add_option("--seed", measure.seed)->capture_default_str();
  add_output(me, measure.out);

  QiArgs qi;
  auto* qs = app.add_subcommand("qi", "Quasi-independence ratio (E N)^2 / E[N^2]");
  configure(qs);
  qs->add_option("--set", qi.set, "A, A_pi or A_prime")->capture_default_str();
  add_shape(qs, qi.shape);
  qs->add_option("--psi", qi.psi, "family:param:param")->capture_default_str();
  qs->add_option("--y", qi.y, "Ball center, comma-separated (default 0)");
  qs->add_option("--q-max", qi.q_max, "Largest shell");
  qs->add_option("--schedule", qi.schedule, "Q values, comma-separated");
  qs->add_option("--samples", qi.samples)->capture_default_str();
  qs->add_option("--seed", qi.seed)->capture_default_str();
  qs->add_option("--budget", qi.budget)->capture_default_str();
  add_output(qs, qi.out);

  SeriesArgs series;
  auto* se = app.add_subcommand("series", "Partial sums of the dichotomy series");
  configure(se);
  add_shape(se, series.shape);
  se->add_option("--psi", series.psi, "family:param:param");
  se->add_option("--mode", series.mode, "plain, partition or coprime-per-coordinate")->capture_default_str();
  se->add_option("--q-max", series.q_max, "Largest q");
  se->add_option("--converge-below", series.converge_below, "Tail ratio below this converges")->capture_default_str();
  se->add_option("--diverge-at-least", series.diverge_at_least, "Tail ratio from this diverges")
      ->capture_default_str();
  se->add_option("--budget", series.budget)->capture_default_str();
  add_output(se, series.out);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Hit counts of random x against the target balls");
  configure(r);
  add_shape(r, run.shape);
  r->add_option("--mode", run.mode, "plain, partition or coprime-per-coordinate")->capture_default_str();
  r->add_option("--psi", run.psi, "family:param:param");
  r->add_option("--y", run.y, "Inhomogeneity, comma-separated (default: drawn from the seed)");
  r->add_option("--q-max", run.q_max, "Largest |q|");
  r->add_option("--schedule", run.schedule, "Q checkpoints, comma-separated (default: decades)");
  r->add_option("--x-samples", run.x_samples)->capture_default_str();
  r->add_option("--seed", run.seed)->capture_default_str();
  r->add_flag("--allow-conjecture", run.allow_conjecture, "Allow coprime-per-coordinate runs with n <= 2");
  r->add_option("--budget", run.budget)->capture_default_str();
  add_output(r, run.out);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  if (s->parsed()) return cmd_sieve(sieve);
  if (l->parsed()) return cmd_lemma(lemma);
  if (me->parsed()) return cmd_measure(measure);
  if (qs->parsed()) return cmd_qi(qi);
  if (se->parsed()) return cmd_series(series);
  if (r->parsed()) return cmd_run(run);
  return static_cast<int>(ExitCode::kUsage);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args.empty() ? std::vector<std::string>{"kgds"} : args);
  } catch (const ValidationError& e) {
    std::cerr << "kgds: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUsage);
  } catch (const ResourceLimitError& e) {
    std::cerr << "kgds: resource limit: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kResourceLimit);
  } catch (const IoError& e) {
    std::cerr << "kgds: I/O error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  } catch (const std::exception& e) {
    std::cerr << "kgds: internal error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

}  // namespace kgds::cli
