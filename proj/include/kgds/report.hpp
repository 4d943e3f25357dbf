#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kgds/arith.hpp"
#include "kgds/experiment.hpp"
#include "kgds/limsup.hpp"

namespace kgds {

enum class Format { kCsv, kJson };
Format parse_format(const std::string& name);  // "csv" or "json"

/// Ordered key/value pairs; the resolved configuration of a run.
using Entries = std::vector<std::pair<std::string, std::string>>;

/// %.17g, with nan/inf spelled out.
std::string format_real(double v);

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// One output: config and metadata, then one or more tables.
///
/// CSV puts the config and metadata in leading "# key=value" comment lines and
/// writes one table per file. JSON writes a single object
/// {"config": {...}, "meta": {...}, "<table>": [{col: value, ...}, ...], ...}.
struct Document {
  Entries config;
  Entries meta;
  std::vector<Table> tables;
};

std::string render_csv(const Document& doc, std::size_t table = 0);
std::string render_json(const Document& doc);

/// Writes every table. For CSV the first table goes to `destination` and
/// table k > 0 to "<stem>.<name>.csv"; "-" means stdout (tables in sequence).
/// Returns the paths written. Throws IoError naming the path.
std::vector<std::string> emit_report(const Document& doc, Format format, const std::string& destination);

/// Paths emit_report would write, without writing.
std::vector<std::string> report_paths(const Document& doc, Format format, const std::string& destination);

void write_text_file(const std::string& path, const std::string& content);

// Documents for each result type. `config` is copied into the document.
Document bound_document(const BoundReport& rep, Entries config);
Document dirichlet_document(const std::vector<DirichletRow>& rows, Entries config);
Document series_document(const SeriesReport& rep, CountMode mode, Entries config);
Document run_document(const ExperimentRun& run, Entries config);

struct MeasureRow {
  std::string set;
  MeasureEstimate estimate;
  std::optional<double> exact;
};
Document measure_document(const std::vector<MeasureRow>& rows, Entries config);

Document qi_document(const std::vector<std::int64_t>& schedule, const std::vector<std::optional<double>>& ratios,
                     Entries config);

Document sieve_document(const SieveTable& sieve, std::uint64_t from, std::uint64_t to, Entries config);

}  // namespace kgds
