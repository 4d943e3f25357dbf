#include "kgds/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "kgds/error.hpp"

namespace kgds {

namespace {

std::string quote_json(const std::string& s) { return nlohmann::json(s).dump(); }

bool needs_csv_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_csv_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

std::string cell_json(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return std::isfinite(v) ? format_real(v) : "null"; }
    std::string operator()(const std::string& v) const { return quote_json(v); }
  };
  return std::visit(V{}, c);
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string entries_json(const Entries& e, const std::string& indent) {
  if (e.empty()) return "{}";
  std::string out = "{\n";
  for (std::size_t i = 0; i < e.size(); ++i) {
    out += indent + "  " + quote_json(e[i].first) + ": " + quote_json(e[i].second);
    out += i + 1 < e.size() ? ",\n" : "\n";
  }
  return out + indent + "}";
}

std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot);
  return path;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw ValidationError("unknown format '" + name + "'; expected csv or json");
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const Document& doc, std::size_t table) {
  if (table >= doc.tables.size()) throw ConsistencyError("render_csv: no such table");
  const auto& t = doc.tables[table];
  std::string out;
  for (const auto& [k, v] : doc.config) out += "# " + k + "=" + one_line(v) + "\n";
  for (const auto& [k, v] : doc.meta) out += "# " + k + "=" + one_line(v) + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(cell_text(row[i]));
    out += "\n";
  }
  return out;
}

std::string render_json(const Document& doc) {
  std::string out = "{\n";
  out += "  \"config\": " + entries_json(doc.config, "  ") + ",\n";
  out += "  \"meta\": " + entries_json(doc.meta, "  ");
  for (const auto& t : doc.tables) {
    out += ",\n  " + quote_json(t.name) + ": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out += r ? ",\n    {" : "\n    {";
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? ", " : "") + quote_json(t.columns[i]) + ": " + cell_json(t.rows[r][i]);
      out += "}";
    }
    out += t.rows.empty() ? "]" : "\n  ]";
  }
  return out + "\n}\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::vector<std::string> report_paths(const Document& doc, Format format, const std::string& destination) {
  if (destination == "-") return {};
  if (format == Format::kJson) return {destination};
  std::vector<std::string> out{destination};
  for (std::size_t k = 1; k < doc.tables.size(); ++k)
    out.push_back(stem_of(destination) + "." + doc.tables[k].name + ".csv");
  return out;
}

std::vector<std::string> emit_report(const Document& doc, Format format, const std::string& destination) {
  if (destination == "-") {
    if (format == Format::kJson) {
      std::cout << render_json(doc);
    } else {
      for (std::size_t k = 0; k < doc.tables.size(); ++k) std::cout << (k ? "\n" : "") << render_csv(doc, k);
    }
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return {};
  }
  const auto paths = report_paths(doc, format, destination);
  if (format == Format::kJson) {
    write_text_file(paths.front(), render_json(doc));
  } else {
    for (std::size_t k = 0; k < doc.tables.size(); ++k) write_text_file(paths[k], render_csv(doc, k));
  }
  return paths;
}

// ---------------------------------------------------------------------------

Document bound_document(const BoundReport& rep, Entries config) {
  Document doc;
  doc.config = std::move(config);
  doc.meta.emplace_back("lemma", rep.lemma);
  for (const auto& [k, v] : rep.params) doc.meta.emplace_back("param." + k, v);
  doc.meta.emplace_back("fitted_constant", rep.fitted_constant ? format_real(*rep.fitted_constant) : "none");
  doc.meta.emplace_back("threshold", rep.threshold ? std::to_string(*rep.threshold) : "none");
  doc.meta.emplace_back("truncated", bool_text(rep.truncated));
  if (!rep.note.empty()) doc.meta.emplace_back("note", rep.note);
  Table t{"values", {"q", "exact", "comparator", "ratio"}, {}};
  for (const auto& row : rep.values)
    t.rows.push_back({row.q, to_string(row.exact), to_string(row.comparator), row.ratio});
  doc.tables.push_back(std::move(t));
  return doc;
}

Document dirichlet_document(const std::vector<DirichletRow>& rows, Entries config) {
  Document doc;
  doc.config = std::move(config);
  std::uint64_t mismatches = 0;
  Table t{"values", {"q", "lhs", "rhs", "equal"}, {}};
  for (const auto& r : rows) {
    const bool eq = r.lhs == r.rhs;
    mismatches += !eq;
    t.rows.push_back({r.q, to_string(r.lhs), to_string(r.rhs), bool_text(eq)});
  }
  doc.meta.emplace_back("lemma", "dirichlet");
  doc.meta.emplace_back("mismatches", std::to_string(mismatches));
  doc.tables.push_back(std::move(t));
  return doc;
}

Document series_document(const SeriesReport& rep, CountMode mode, Entries config) {
  Document doc;
  doc.config = std::move(config);
  const bool ds = mode == CountMode::kCoprime;
  doc.meta.emplace_back("psi", rep.psi);
  doc.meta.emplace_back("verdict_series", ds ? "S_ds" : "S_kg");
  doc.meta.emplace_back("verdict_kg", verdict_name(rep.verdict_kg));
  doc.meta.emplace_back("verdict_ds", verdict_name(rep.verdict_ds));
  doc.meta.emplace_back("tail_ratio_kg", format_real(rep.tail_ratio_kg));
  doc.meta.emplace_back("tail_ratio_ds", format_real(rep.tail_ratio_ds));
  Table t{"series", {"Q", "S_kg", "S_ds", "verdict"}, {}};
  for (std::size_t i = 0; i < rep.Q.size(); ++i)
    t.rows.push_back({rep.Q[i], rep.S_kg[i], rep.S_ds[i],
                      std::string(verdict_name(ds ? rep.row_verdict_ds[i] : rep.row_verdict_kg[i]))});
  doc.tables.push_back(std::move(t));
  return doc;
}

Document run_document(const ExperimentRun& run, Entries config) {
  Document doc;
  doc.config = std::move(config);
  std::string y;
  for (std::size_t i = 0; i < run.config.y->size(); ++i) y += (i ? "," : "") + format_real((*run.config.y)[i]);
  doc.meta.emplace_back("y", y);
  doc.meta.emplace_back("psi", run.config.psi.describe());
  doc.meta.emplace_back("in_hypothesis", bool_text(run.in_hypothesis));
  if (!run.hypothesis_note.empty()) doc.meta.emplace_back("hypothesis_note", run.hypothesis_note);
  doc.meta.emplace_back("operations", std::to_string(run.operations));
  Table hits{"dichotomy", {"x_index", "Q", "hits_plain", "hits_constrained"}, {}};
  for (std::size_t x = 0; x < run.hits_plain.size(); ++x)
    for (std::size_t k = 0; k < run.config.schedule.size(); ++k)
      hits.rows.push_back({static_cast<std::uint64_t>(x), run.config.schedule[k], run.hits_plain[x][k],
                           run.hits_constrained[x][k]});
  Table sum{"summary", {"Q", "frac_x_with_new_hits", "median_hits"}, {}};
  for (const auto& w : run.summary) sum.rows.push_back({w.Q, w.frac_x_with_new_hits, w.median_hits});
  doc.tables.push_back(std::move(hits));
  doc.tables.push_back(std::move(sum));
  return doc;
}

Document measure_document(const std::vector<MeasureRow>& rows, Entries config) {
  Document doc;
  doc.config = std::move(config);
  Table t{"measure", {"set", "mean", "std_error", "samples", "seed", "exact"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({r.set, r.estimate.mean, r.estimate.std_error, r.estimate.samples, r.estimate.seed,
                      r.exact ? Cell(*r.exact) : Cell(std::monostate{})});
  doc.tables.push_back(std::move(t));
  return doc;
}

Document qi_document(const std::vector<std::int64_t>& schedule, const std::vector<std::optional<double>>& ratios,
                     Entries config) {
  Document doc;
  doc.config = std::move(config);
  Table t{"qi", {"Q", "ratio"}, {}};
  for (std::size_t k = 0; k < schedule.size(); ++k)
    t.rows.push_back({schedule[k], ratios[k] ? Cell(*ratios[k]) : Cell(std::monostate{})});
  doc.tables.push_back(std::move(t));
  return doc;
}

Document sieve_document(const SieveTable& sieve, std::uint64_t from, std::uint64_t to, Entries config) {
  Document doc;
  doc.config = std::move(config);
  Table t{"sieve", {"n", "phi", "mu", "spf"}, {}};
  for (std::uint64_t n = from; n <= to; ++n)
    t.rows.push_back({n, static_cast<std::uint64_t>(sieve.phi(n)), static_cast<std::int64_t>(sieve.mu(n)),
                      static_cast<std::uint64_t>(sieve.smallest_prime_factor(n))});
  doc.tables.push_back(std::move(t));
  return doc;
}

}  // namespace kgds
