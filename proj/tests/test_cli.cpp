#include "bcs/commands.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bcs;

namespace {

const std::filesystem::path kScenarioDir = BCS_SCENARIO_DIR;

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("bcs_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("control spec parsing") {
  const auto c = parse_control_spec("const:0.5", 1);
  CHECK(c.cyclic);
  CHECK(c.values.at(0)(0) == doctest::Approx(0.5));

  const auto p = parse_control_spec("pwc:0.5@1;0.25@-1", 1);
  CHECK_FALSE(p.cyclic);
  REQUIRE(p.durations.size() == 2);
  CHECK(p.durations[1] == doctest::Approx(0.25));
  CHECK(p.values[1](0) == doctest::Approx(-1.0));

  const auto cy = parse_control_spec("cyclic:0.5@1;0.5@-1", 1);
  CHECK(cy.cyclic);

  CHECK_THROWS_AS(parse_control_spec("bogus", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_control_spec("const:1,2", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_control_spec("pwc:nope@1", 1), std::invalid_argument);
}

TEST_CASE("simulate: endpoint value, single row at t = 0, byte-identical reruns") {
  const auto sc = load_scenario(kScenarioDir / "example1.json");
  const auto dir = temp_dir("sim");
  const auto u = parse_control_spec("const:1", 1);

  cmd_simulate(sc, oracle::vec2(1, 1), u, 1.0, 100, dir / "a.csv");
  const std::string body = slurp(dir / "a.csv");
  CHECK(body.rfind("t,x1,x2", 0) == 0);
  // final row reaches (e^2, e^2)
  const auto last_nl = body.find_last_of('\n', body.size() - 2);
  std::stringstream last(body.substr(last_nl + 1));
  std::string t_str, x1_str, x2_str;
  std::getline(last, t_str, ',');
  std::getline(last, x1_str, ',');
  std::getline(last, x2_str, ',');
  CHECK(std::stod(t_str) == doctest::Approx(1.0));
  CHECK(std::stod(x1_str) == doctest::Approx(std::exp(2.0)).epsilon(1e-10));
  CHECK(std::stod(x2_str) == doctest::Approx(std::exp(2.0)).epsilon(1e-10));

  cmd_simulate(sc, oracle::vec2(1, 1), u, 1.0, 100, dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  cmd_simulate(sc, oracle::vec2(1, 1), u, 0.0, 100, dir / "zero.csv");
  const std::string zero = slurp(dir / "zero.csv");
  CHECK(std::count(zero.begin(), zero.end(), '\n') == 2);  // header + one row
}

TEST_CASE("simulate matches the known solution of the spiral system") {
  const auto sc = load_scenario(kScenarioDir / "example2.json");
  const auto dir = temp_dir("sim2");
  const auto u = parse_control_spec("cyclic:0.4@0.3;0.7@-0.8;0.2@1", 1);
  cmd_simulate(sc, oracle::vec2(0.4, -1.1), u, 3.0, 60, dir / "t.csv");

  std::ifstream in(dir / "t.csv");
  std::string line;
  std::getline(in, line);  // header
  double worst = 0.0;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string f;
    std::getline(row, f, ',');
    const double t = std::stod(f);
    std::getline(row, f, ',');
    const double x1 = std::stod(f);
    std::getline(row, f, ',');
    const double x2 = std::stod(f);
    const Vector want = oracle::example2_closed_form(t, oracle::vec2(0.4, -1.1), u);
    worst = std::max(worst, std::hypot(x1 - want(0), x2 - want(1)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("plot: polygon SVG with markers, legend for overlays, empty input rejected") {
  const auto dir = temp_dir("plot");
  write_radial_csv(make_polygon({{0, 0}, {0, 1}, {1, 1}}, 256), dir / "tri.csv");
  write_radial_csv(make_ball(256), dir / "ball.csv");

  cmd_plot({dir / "tri.csv"}, PlotOptions{}, dir / "one.svg");
  const std::string one = slurp(dir / "one.svg");
  CHECK(one.find("<svg") != std::string::npos);
  CHECK(one.find("<path") != std::string::npos);
  CHECK(one.find("<circle") != std::string::npos);  // vertex markers
  CHECK(one.find("<text") == std::string::npos);    // no legend for one set

  cmd_plot({dir / "tri.csv", dir / "ball.csv"}, PlotOptions{}, dir / "two.svg");
  const std::string two = slurp(dir / "two.svg");
  CHECK(two.find("<text") != std::string::npos);

  std::ofstream(dir / "empty.csv") << "";
  CHECK_THROWS(cmd_plot({dir / "empty.csv"}, PlotOptions{}, dir / "bad.svg"));
  CHECK_THROWS_AS(cmd_plot({}, PlotOptions{}, dir / "none.svg"), std::invalid_argument);
}

TEST_CASE("pipeline on a trivial system: rate 0 and the unit disc pass") {
  Scenario sc{"trivial",
              BilinearSystem(Matrix::Zero(2, 2), {Matrix::Zero(2, 2)}, oracle::vec1(-1),
                             oracle::vec1(1)),
              ScenarioDefaults{}, std::nullopt};
  sc.defaults.grid = 256;
  sc.defaults.bins = 180;
  sc.defaults.control_samples = 5;
  sc.defaults.graph_samples = 3;
  sc.defaults.verify_samples = 5;
  sc.defaults.horizon = 20.0;
  sc.defaults.restarts = 4;
  sc.defaults.budget = 20000;

  const auto dir = temp_dir("pipe_trivial");
  const auto res = cmd_pipeline(sc, CliOverrides{}, dir);
  INFO(res.summary());
  CHECK(res.ok);
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  CHECK(std::filesystem::exists(dir / "rate.json"));
  const std::string rate = slurp(dir / "rate.json");
  CHECK(rate.find("\"lower\": 0.0") != std::string::npos);
  // the constructed set is the unit disc
  const auto d = read_radial_csv(dir / "d_0.csv");
  CHECK(hausdorff(d, make_ball(d.n_angles())) < 1e-6);
}

TEST_CASE("pipeline on the bundled example1 with reduced effort") {
  auto sc = load_scenario(kScenarioDir / "example1.json");
  sc.defaults.grid = 512;
  sc.defaults.bins = 360;
  sc.defaults.budget = 150000;
  sc.defaults.horizon = 150.0;
  sc.defaults.restarts = 8;
  sc.defaults.verify_times = {0.25, 0.5};

  const auto dir = temp_dir("pipe_ex1");
  const auto res = cmd_pipeline(sc, CliOverrides{}, dir);
  INFO(res.summary());
  CHECK(res.ok);
  for (const char* f : {"accessibility.txt", "arcs.csv", "rate.json", "d_0.csv", "d_1.csv",
                        "union.csv", "verify.csv", "sets.svg", "summary.txt"})
    CHECK(std::filesystem::exists(dir / f));
}

TEST_SUITE_END();
