#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kgds/error.hpp"
#include "kgds/report.hpp"

using namespace kgds;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Document sample() {
  Document d;
  d.config = {{"subcommand", "test"}, {"psi", "power:1:2"}};
  d.meta = {{"note", "a,b"}};
  d.tables.push_back(Table{"main", {"Q", "value", "label"}, {}});
  d.tables[0].rows.push_back({std::int64_t{10}, 0.1, std::string("x,y")});
  d.tables[0].rows.push_back({std::int64_t{20}, Cell(std::monostate{}), std::string("plain")});
  d.tables.push_back(Table{"summary", {"Q", "frac"}, {}});
  d.tables[1].rows.push_back({std::int64_t{10}, 1.0 / 3.0});
  return d;
}

}  // namespace

TEST_CASE("seventeen significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::stod(format_real(2.0 / 7.0)) == 2.0 / 7.0);
}

TEST_CASE("csv carries the config and quotes fields") {
  const auto text = render_csv(sample(), 0);
  CHECK(text.rfind("# subcommand=test\n# psi=power:1:2\n# note=a,b\nQ,value,label\n", 0) == 0);
  CHECK(text.find("10,0.10000000000000001,\"x,y\"\n") != std::string::npos);
  CHECK(text.find("20,,plain\n") != std::string::npos);
  CHECK(render_csv(sample(), 1).find("10,0.33333333333333331") != std::string::npos);
  CHECK_THROWS(render_csv(sample(), 2));
}

TEST_CASE("json is valid and round-trips") {
  const auto j = nlohmann::json::parse(render_json(sample()));
  CHECK(j["config"]["psi"] == "power:1:2");
  CHECK(j["meta"]["note"] == "a,b");
  CHECK(j["main"].size() == 2);
  CHECK(j["main"][0]["value"].get<double>() == 0.1);
  CHECK(j["main"][1]["value"].is_null());
  CHECK(j["summary"][0]["frac"].get<double>() == 1.0 / 3.0);
  CHECK(render_json(sample()).find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("emit_report writes one file per table") {
  const auto paths = emit_report(sample(), Format::kCsv, "report_test.csv");
  REQUIRE(paths.size() == 2);
  CHECK(paths[1] == "report_test.summary.csv");
  CHECK(slurp("report_test.csv") == render_csv(sample(), 0));
  CHECK(slurp("report_test.summary.csv") == render_csv(sample(), 1));
  const auto jp = emit_report(sample(), Format::kJson, "report_test.json");
  CHECK(jp.size() == 1);
  CHECK(slurp("report_test.json") == render_json(sample()));
  for (const char* p : {"report_test.csv", "report_test.summary.csv", "report_test.json"}) std::remove(p);
  CHECK_THROWS_AS(emit_report(sample(), Format::kCsv, "/nonexistent-dir/out.csv"), IoError);
  CHECK_THROWS_AS(parse_format("xml"), ValidationError);
}
