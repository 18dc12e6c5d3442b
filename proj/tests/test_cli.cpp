#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "brainschema/bench.hpp"
#include "brainschema/cli.hpp"
#include "brainschema/triple_io.hpp"
#include "oracles.hpp"

using namespace brainschema;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("brainschema-cli-" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    if (!content.empty()) std::ofstream(dir / name) << content;
    return (dir / name).string();
  }
};

const char* kTinyConfig =
    "# 160-neuron cortex\n"
    "regions_per_hemisphere = 2\n"
    "total_columns = 8\n"
    "total_neurons = 160\n"
    "neurons_per_microcolumn = 10\n";

}  // namespace

TEST_CASE("table1") {
  const Run all = run({"table1"});
  CHECK(all.code == 0);
  CHECK(all.out.find("3,387,096") != std::string::npos);
  CHECK(all.out.find("erratum: microcolumns_per_column printed 2,100, derived 2,600") != std::string::npos);

  const Run one = run({"table1", "--neurons", "21000000000", "--columns", "210000", "--format", "csv"});
  CHECK(one.code == 0);
  CHECK(one.out ==
        "regions,columns,columns_per_region,microcolumns_per_column,microcolumns,layers,"
        "microcolumns_per_region,regions_columns,neurons_per_region_columns,regions_microcolumns,"
        "neurons_per_region_microcolumns,total_neurons,note\n"
        "62,210000,3387,1000,210000000,5,3387096,1050000,20000,1050000000,20,21000000000,\n");

  CHECK(run({"--schema", "cerebellum", "table1", "--neurons", "5000000000"}).code == 1);
}

TEST_CASE("label, resolve and regions") {
  Scratch s;
  const std::string cfg = s.file("tiny.cfg", kTinyConfig);
  CHECK(run({"resolve", "left/region_01/1/1/II", "--config", cfg}).out == "[0,2)\n");
  CHECK(run({"resolve", "left", "--config", cfg}).out == "[0,80)\n");
  CHECK(run({"resolve", "right/region_02/2/2/VI#2", "--config", cfg}).out == "[159,160)\n");
  CHECK(run({"label", "159", "--config", cfg}).out == "right/region_02/2/2/VI#2\n");
  CHECK(run({"label", "0"}).out == "left/region_01/1/1/II#1\n");
  CHECK(run({"regions", "--depth", "1", "--config", cfg}).out == "left\nright\n");
  CHECK(run({"regions", "--count", "--config", cfg}).out == "80\n");
  CHECK(run({"regions", "--count"}).out == "1050000000\n");
  CHECK(run({"regions", "--limit", "2"}).out == "left/region_01/1/1/II\nleft/region_01/1/1/III\n");
  CHECK(run({"--schema", "cerebellum", "regions", "--depth", "2"}).out ==
        "left/region_01\nleft/region_02\nleft/region_03\nright/region_01\nright/region_02\nright/region_03\n");

  const Run bad = run({"resolve", "left/region_01/9", "--config", cfg});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("component 3") != std::string::npos);
  CHECK(run({"label", "160", "--config", cfg}).code == 2);
  CHECK(run({"regions", "--depth", "6"}).code == 1);
}

TEST_CASE("gen writes a triple file") {
  Scratch s;
  const std::string out = s.file("block.tsv");
  const Run r = run({"gen", "--dim", "100", "--sparsity", "0.1", "--seed", "4", "--out", out});
  CHECK(r.code == 0);
  std::ifstream in(out);
  const auto triples = read_triples(in);
  CHECK(triples.size() == 1000);
  const Schema schema(CortexConfig{});
  CHECK(triples == label_triples(generate_block({0, 0, 100, 0.1, 4}), {0, 0, 100, 0.1, 4}, schema));
  CHECK(run({"gen", "--sparsity", "0"}).code == 1);
}

TEST_CASE("bench") {
  Scratch s;
  const std::string csv = s.file("out.csv");
  const std::string svg = s.file("out.svg");
  const Run r = run({"bench", "--entries", "1000", "--workers", "1,2", "--trials", "1", "--csv", csv,
                     "--plot", svg, "--work-dir", (s.dir / "work").string()});
  CHECK(r.code == 0);
  std::ifstream in(csv);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].entries == 1000);
  std::ifstream plot(svg);
  const std::string svg_text((std::istreambuf_iterator<char>(plot)), std::istreambuf_iterator<char>());
  CHECK(oracle::well_formed_xml(svg_text));

  const Run mem = run({"bench", "--entries", "500", "--workers", "1", "--trials", "2", "--backend", "mem"});
  CHECK(mem.code == 0);
  CHECK(parse_csv(mem.out).size() == 2);
}

TEST_CASE("usage errors exit 1 with usage text") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"bench", "--bogus"}, {"frobnicate"}, {}, {"label"}, {"bench", "--workers", "1,x"},
           {"bench", "--workers", "0"}, {"--schema", "pons", "regions"}}) {
    const Run r = run(args);
    CAPTURE(args.size());
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
  CHECK(run({"--help"}).code == 0);
  Scratch s;
  CHECK(run({"regions", "--config", s.file("bad.cfg", "lobules = 2\n")}).code == 1);
}

TEST_CASE("preset flag resolves to the large 3 x 10 sweep") {
  const Run r = run({"bench", "--paper-preset", "--dry-run"});
  CHECK(r.code == 0);
  CHECK(r.out.find("entries: 50000000,100000000,500000000\n") != std::string::npos);
  CHECK(r.out.find("workers: 1,2,4,6,8,10,12,14,16,18\n") != std::string::npos);
  CHECK(r.out.find("cells: 90\n") != std::string::npos);
}
