#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cera/errors.hpp"
#include "cera/report.hpp"

using namespace cera;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("inline spec parsing") {
  CHECK(parse_spec("L=2,m=2,2,mode=expanded") == CodebookSpec(Mode::Expanded, {2, 2}));
  CHECK(parse_spec("L=4,m=3") == CodebookSpec::uniform(Mode::Expanded, 4, 3));
  CHECK(parse_spec("L=2, m=4, mode=reference") == CodebookSpec::uniform(Mode::Reference, 2, 4));
  CHECK(parse_spec("m=1,4,M=64").global_preambles() == 64);
  CHECK(parse_spec("L=3,m=1,2,3").budgets() == std::vector<std::uint32_t>{1, 2, 3});
  CHECK_THROWS_AS(parse_spec("L=3,m=1,2"), InvalidSpec);
  CHECK_THROWS_AS(parse_spec("L=2,m=2,mode=sideways"), InvalidSpec);
  CHECK_THROWS_AS(parse_spec("L=2,m=-1"), InvalidSpec);
  CHECK_THROWS_AS(parse_spec("L=2,q=3"), InvalidSpec);
  CHECK_THROWS_AS(parse_spec("L=0,m=2"), InvalidSpec);
  CHECK_THROWS_AS(parse_spec(""), InvalidSpec);
}

TEST_CASE("spec describe round-trips") {
  for (const auto& spec : {CodebookSpec(Mode::Expanded, {1, 4, 0}), CodebookSpec::uniform(Mode::Reference, 4, 32),
                           CodebookSpec(Mode::Expanded, {3, 3}, 64)}) {
    CHECK(parse_spec(spec.describe()) == spec);
    CHECK(spec_from_json(spec_to_json(spec)) == spec);
  }
}

TEST_CASE("JSON spec parsing") {
  CHECK(parse_spec(R"({"L": 2, "m": [2, 2], "mode": "expanded"})") == CodebookSpec(Mode::Expanded, {2, 2}));
  CHECK(parse_spec(R"({"L": 3, "m": 2})") == CodebookSpec::uniform(Mode::Expanded, 3, 2));
  CHECK_THROWS_AS(parse_spec(R"({"L": 2, "m": [2, 2)"), ParseError);
  CHECK_THROWS_AS(parse_spec(R"({"L": 2})"), InvalidSpec);
  CHECK_THROWS_AS(parse_spec(R"({"L": 2, "m": [2, -2]})"), InvalidSpec);

  const auto dir = std::filesystem::temp_directory_path() / "cera_report_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "spec.json";
  write_atomic(file, R"({"m": [1, 4], "mode": "expanded"})");
  CHECK(parse_spec(file.string()) == CodebookSpec(Mode::Expanded, {1, 4}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario documents") {
  const auto s = parse_scenario(R"({"spec": "L=2,m=2,2", "N": [1, 5], "trials": 10, "master_seed": 7})");
  CHECK(s.spec == CodebookSpec(Mode::Expanded, {2, 2}));
  CHECK(s.users == std::vector<std::uint64_t>{1, 5});
  CHECK(s.trials == 10);
  CHECK(s.master_seed == 7);
  const auto again = parse_scenario(scenario_to_json(s).dump());
  CHECK(again.users == s.users);
  CHECK(again.spec == s.spec);
  CHECK(parse_scenario(R"({"spec": {"L": 1, "m": [3]}, "N": 4})").users == std::vector<std::uint64_t>{4});
  CHECK_THROWS_AS(parse_scenario("{not json"), ParseError);
  CHECK_THROWS_AS(parse_scenario(R"({"spec": "L=2,m=2", "N": 3, "trials": 0})"), InvalidSpec);
  CHECK_THROWS_AS(parse_scenario(R"({"spec": "L=2,m=2", "N": 0})"), InvalidSpec);
  CHECK_THROWS_AS(parse_scenario(R"({"N": 2})"), InvalidSpec);
}

TEST_CASE("grids") {
  CHECK(parse_grid("1:5") == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(parse_grid("2:10:4") == std::vector<std::uint64_t>{2, 6, 10});
  CHECK(parse_grid("7") == std::vector<std::uint64_t>{7});
  CHECK(describe_grid(parse_grid("2:10:4")) == "2:10:4");
  CHECK_THROWS_AS(parse_grid("0:5"), InvalidSpec);
  CHECK_THROWS_AS(parse_grid("a:b"), InvalidSpec);
  CHECK_THROWS_AS(parse_grid("1:2:3:4"), InvalidSpec);
}

TEST_CASE("fixed formatting") {
  CHECK(format_fixed(6.0 / 7.0) == "0.857143");
  CHECK(format_fixed(0.5) == "0.500000");
  CHECK(format_fixed(-0.0) == "0.000000");
  CHECK(format_fixed(-1e-12) == "0.000000");
}

TEST_CASE("chain dumps match the golden tables") {
  const std::filesystem::path golden(CERA_GOLDEN_DIR);
  CHECK(chain_dump_csv(build_transition_model(CodebookSpec(Mode::Expanded, {2, 2}))) ==
        slurp(golden / "chain_L2_M2.csv"));
  CHECK(chain_dump_csv(build_transition_model(CodebookSpec(Mode::Expanded, {4, 4}))) ==
        slurp(golden / "chain_L2_M4.csv"));
  CHECK(chain_dump_csv(build_transition_model(CodebookSpec(Mode::Expanded, {1}))) ==
        "state_id,C_1,cardinality,initial,transitions\n1,2,1,1,1:1\n");
}

TEST_CASE("CSV writers") {
  const std::vector<CurvePoint> curve{{1, 1.0}, {2, 6.0 / 7.0}};
  CHECK(curve_csv(curve) == "N,efficiency\n1,1.000000\n2,0.857143\n");

  AggregateStats single;
  single.trials = 1;
  single.perceived.mean = 2;
  const std::vector<std::pair<std::uint64_t, AggregateStats>> rows{{1, single}};
  const auto csv = simulation_csv(rows);
  CHECK(csv.rfind("N,mean_singles,mean_perceived,mean_phantoms,efficiency,se_efficiency,", 0) == 0);
  CHECK(csv.find("\n1,0.000000,2.000000,0.000000,0.000000,,,,,0.000000,,1\n") != std::string::npos);

  ThresholdSchedule schedule;
  schedule.segments.push_back({1, 13, CodebookSpec::uniform(Mode::Reference, 2, 4), 8, 1.0, 0.4});
  schedule.segments.push_back({14, 15, CodebookSpec(Mode::Expanded, {2, 4}), 14, 0.41, 0.42});
  CHECK(schedule_csv(schedule) ==
        "N_low,N_high,mode,budgets,cardinality,efficiency_low,efficiency_high\n"
        "1,13,reference,4 4,8,1.000000,0.400000\n"
        "14,15,expanded,2 4,14,0.410000,0.420000\n");
}

TEST_CASE("SVG plot is self-contained") {
  const std::vector<SvgSeries> series{{"a", {{1, 1.0}, {10, 0.2}}}, {"b", {{1, 0.5}, {10, 0.4}}}};
  const auto svg = svg_plot(series, {"title", "N", "efficiency", true});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
  std::size_t lines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("atomic writes replace the target and leave no temporary") {
  const auto dir = std::filesystem::temp_directory_path() / "cera_atomic_test";
  std::filesystem::remove_all(dir);
  write_atomic(dir / "x.csv", "one\n");
  write_atomic(dir / "x.csv", "two\n");
  CHECK(slurp(dir / "x.csv") == "two\n");
  CHECK_FALSE(std::filesystem::exists(dir / "x.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest") {
  RunManifest m;
  m.command = "simulate";
  m.master_seed = 5;
  m.outputs = {"simulate.csv"};
  const auto j = m.to_json();
  CHECK(j["command"] == "simulate");
  CHECK(j["master_seed"] == 5);
  CHECK(j["tool_version"] == std::string(kToolVersion));
  CHECK(j.contains("wall_clock_seconds"));
  RunManifest none;
  CHECK(none.to_json()["master_seed"].is_null());
}
