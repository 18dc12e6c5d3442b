#include <doctest.h>

#include <random>
#include <regex>

#include "brainschema/bench.hpp"
#include "oracles.hpp"

using namespace brainschema;

namespace {

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

/// Point counts of every <polyline> in document order.
std::vector<std::size_t> polyline_points(const std::string& svg) {
  std::vector<std::size_t> out;
  const std::regex re("<polyline[^>]* points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    const std::string pts = (*it)[1];
    out.push_back(pts.empty() ? 0 : count_of(pts, " ") + 1);
  }
  return out;
}

BenchPlan small_plan() {
  BenchPlan p;
  p.entry_counts = {1000};
  p.worker_counts = {1, 2};
  p.trials = 1;
  p.backend = Backend::memory;
  return p;
}

}  // namespace

TEST_CASE("sweep produces one row per cell in order") {
  const auto rows = run_sweep(small_plan());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].workers == 1);
  CHECK(rows[1].workers == 2);
  for (const auto& r : rows) {
    CHECK(r.entries == 1000);
    CHECK(r.trial == 1);
    CHECK(r.for_rate > 0);
    CHECK(r.load_rate > 0);
    CHECK(r.ingest_rate > 0);
    CHECK(r.total_seconds > 0);
  }

  BenchPlan p = small_plan();
  p.entry_counts = {500, 1500};
  p.trials = 3;
  p.backend = Backend::durable;
  const auto many = run_sweep(p);
  CHECK(many.size() == 2 * 2 * 3);
  CHECK(many.front().entries == 500);
  CHECK(many.back().entries == 1500);
  CHECK(many.back().trial == 3);
}

TEST_CASE("large preset grid") {
  const BenchPlan p = BenchPlan::paper_preset();
  CHECK(p.entry_counts == std::vector<count_t>{50'000'000, 100'000'000, 500'000'000});
  CHECK(p.worker_counts == std::vector<count_t>{1, 2, 4, 6, 8, 10, 12, 14, 16, 18});
  CHECK(p.cells() == 3 * 10 * p.trials);
  CHECK_NOTHROW(validate_plan(p));
}

TEST_CASE("invalid plans") {
  BenchPlan p = small_plan();
  p.worker_counts = {};
  CHECK_THROWS_AS(validate_plan(p), ConfigError);
  p = small_plan();
  p.entry_counts = {0};
  CHECK_THROWS_AS(validate_plan(p), ConfigError);
  p = small_plan();
  p.trials = 0;
  CHECK_THROWS_AS(run_sweep(p), ConfigError);
}

TEST_CASE("a failing sweep keeps its completed rows") {
  BenchPlan p = small_plan();
  CortexConfig c;
  c.total_neurons = 1'000'000;
  c.total_columns = 62;
  p.schema = c;
  p.block_dim = 1000;
  p.max_block_entries = 1000;
  p.worker_counts = {1};
  p.entry_counts = {1000, 10'000'000};  // the second needs more blocks than the neuron space holds
  try {
    run_sweep(p);
    FAIL("expected SweepError");
  } catch (const SweepError& e) {
    REQUIRE(e.rows().size() == 1);
    CHECK(e.rows()[0].entries == 1000);
  }
}

TEST_CASE("CSV") {
  const std::vector<BenchResultRow> one{{1000, 1, 1, 10, 20, 5, 100}};
  const std::string csv = emit_csv(one);
  CHECK(csv == "entries,workers,trial,for_rate,load_rate,ingest_rate,total_seconds\n1000,1,1,10,20,5,100\n");
  CHECK(count_of(csv, "\n") == 2);
  CHECK(emit_csv({}) == std::string(kCsvHeader) + "\n");
  CHECK(parse_csv(emit_csv({})).empty());

  std::mt19937_64 rng(3);
  std::vector<BenchResultRow> rows;
  for (int i = 0; i < 500; ++i) {
    const auto real = [&] { return std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(rng() % 40)); };
    rows.push_back({rng() % 1'000'000'000, 1 + rng() % 18, 1 + rng() % 3, real(), real(), real(), real()});
  }
  CHECK(parse_csv(emit_csv(rows)) == rows);

  CHECK_THROWS_AS(parse_csv("entries,workers\n"), FormatError);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), FormatError);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,2,3,a,1,1,1\n"), FormatError);
  CHECK_THROWS_AS(parse_csv(""), FormatError);
}

TEST_CASE("plot") {
  const std::vector<BenchResultRow> rows{
      {1000, 1, 1, 10, 20, 5, 1},  {1000, 1, 2, 30, 40, 7, 1},
      {1000, 4, 1, 50, 60, 100, 1}, {1000, 4, 2, 70, 80, 200, 1},
  };
  const auto means = mean_rates_by_workers(rows);
  REQUIRE(means.size() == 2);
  CHECK(means[1].workers == 4);
  CHECK(means[1].ingest_rate == 150.0);
  CHECK(means[0].for_rate == 20.0);

  const std::string svg = emit_plot(rows);
  CHECK(oracle::well_formed_xml(svg));
  CHECK(polyline_points(svg) == std::vector<std::size_t>{2, 2, 2});
  CHECK(svg.find("ingest rate @ 4 workers: 150<") != std::string::npos);
  CHECK(svg.find(">workers</text>") != std::string::npos);
  CHECK(svg.find("entries per second") != std::string::npos);
  CHECK(count_of(svg, "<circle") == 6);

  std::vector<BenchResultRow> two_sizes = rows;
  for (auto r : rows) {
    r.entries = 5000;
    two_sizes.push_back(r);
  }
  const std::string split = emit_plot(two_sizes, {true});
  CHECK(oracle::well_formed_xml(split));
  CHECK(polyline_points(split).size() == 6);

  const std::vector<BenchResultRow> single{{1000, 2, 1, 1, 1, 1, 1}};
  CHECK(oracle::well_formed_xml(emit_plot(single)));
  CHECK_THROWS_AS(emit_plot({}), Error);
}

TEST_CASE("xml oracle rejects malformed documents") {
  CHECK(oracle::well_formed_xml("<a><b/></a>"));
  CHECK_FALSE(oracle::well_formed_xml("<a><b></a>"));
  CHECK_FALSE(oracle::well_formed_xml("<a x=\"1></a>"));
  CHECK_FALSE(oracle::well_formed_xml("<a></a><b/>"));
  CHECK_FALSE(oracle::well_formed_xml("<a>&</a>"));
}

TEST_CASE("smoke checks") {
  const std::vector<BenchResultRow> good{{1, 1, 1, 10, 10, 5, 1}, {1, 8, 1, 80, 80, 10, 1}};
  auto checks = smoke_checks(good, 8);
  REQUIRE(checks.size() == 2);
  CHECK(checks[0].status == SmokeStatus::pass);
  CHECK(checks[1].status == SmokeStatus::pass);

  checks = smoke_checks(good, 2);
  CHECK(checks[0].status == SmokeStatus::skipped);

  const std::vector<BenchResultRow> flat{{1, 1, 1, 10, 1, 5, 1}, {1, 8, 1, 80, 80, 6, 1}};
  checks = smoke_checks(flat, 16);
  CHECK(checks[0].status == SmokeStatus::warn);
  CHECK(checks[1].status == SmokeStatus::warn);
  CHECK(checks[1].detail.find("1 workers") != std::string::npos);

  checks = smoke_checks({{1, 2, 1, 1, 1, 1, 1}}, 16);
  CHECK(checks[0].status == SmokeStatus::skipped);
}
