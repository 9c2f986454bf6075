#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "oracles.hpp"
#include "sweep/harness.hpp"

using namespace sweep;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sweep_harness_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string body_of(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

const char* kHalfLine = R"({
  "scheme": "skorokhod", "T": 1, "n": 512, "seed": 3,
  "set": {"family": "box", "params": {"lower": [0], "upper": ["inf"]}, "gamma": [1], "r": 1},
  "initial": [0.5],
  "driver": {"kind": "analytic", "name": "sine", "amplitude": 1, "omega": 12.566370614359172, "slope": -0.3}
})";

}  // namespace

TEST_SUITE("cli_harness") {
  TEST_CASE("csv formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
      CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    CsvTable t;
    t.metadata = {" hello"};
    t.header = {"t", "x"};
    t.body.resize(2, 2);
    t.body << 0, 1.0 / 3.0, 0.5, -1e-17;
    const auto back = parse_csv_text(to_csv_text(t));
    CHECK(back.metadata == t.metadata);
    CHECK(back.header == t.header);
    CHECK(back.body == t.body);
    CHECK_THROWS_AS(parse_csv_text("t,x\n0,abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv_text("t,x\n0\n"), std::invalid_argument);
  }

  TEST_CASE("zero-everything simulation stays at the initial point") {
    const auto dir = scratch("zero");
    const auto cfg = write_file(dir, "c.json", R"({"scheme": "euler", "n": 16,
      "set": {"family": "ball", "params": {"center": [0, 0], "radius": 1}},
      "initial": [0.25, -0.5], "field": {"kind": "zero"}, "driver": {"kind": "zero"}})");
    std::ostringstream out, err;
    REQUIRE(run_simulate({cfg, dir, std::nullopt, false, true}, out, err) == kExitOk);
    const auto t = read_csv(dir / "trajectory.csv");
    CHECK(t.header == std::vector<std::string>{"t", "X1", "X2", "H1", "H2", "Y1", "Y2"});
    CHECK(t.body.rows() == 17);
    for (Eigen::Index r = 0; r < t.body.rows(); ++r) {
      CHECK(t.body(r, 1) == 0.25);
      CHECK(t.body(r, 2) == -0.5);
    }
    bool has_echo = false;
    for (const auto& m : t.metadata) has_echo |= m.rfind(" config: {", 0) == 0;
    CHECK(has_echo);
  }

  TEST_CASE("half-line simulation matches the explicit map") {
    const auto dir = scratch("half");
    const auto cfg = write_file(dir, "c.json", kHalfLine);
    std::ostringstream out, err;
    REQUIRE(run_simulate({cfg, dir, std::nullopt, false, true}, out, err) == kExitOk);
    const auto t = read_csv(dir / "trajectory.csv");
    std::vector<double> h(static_cast<std::size_t>(t.body.rows()));
    for (Eigen::Index r = 0; r < t.body.rows(); ++r) h[static_cast<std::size_t>(r)] = t.body(r, 2);
    const auto w = oracle::half_line_reflection(0.5, h);
    for (Eigen::Index r = 0; r < t.body.rows(); ++r) {
      const double tt = t.body(r, 0);
      CHECK(h[static_cast<std::size_t>(r)] == std::sin(4 * std::numbers::pi * tt) - 0.3 * tt);
      CHECK(t.body(r, 3) == w[static_cast<std::size_t>(r)]);
    }
  }

  TEST_CASE("trajectory re-ingested as a driver reproduces the run") {
    const auto dir = scratch("roundtrip");
    write_file(dir, "c.json", kHalfLine);
    std::ostringstream out, err;
    REQUIRE(run_simulate({dir / "c.json", dir, std::nullopt, false, true}, out, err) == kExitOk);
    fs::rename(dir / "trajectory.csv", dir / "first.csv");
    write_file(dir, "again.json", R"({"scheme": "skorokhod", "T": 1,
      "set": {"family": "box", "params": {"lower": [0], "upper": ["inf"]}, "gamma": [1], "r": 1},
      "initial": [0.5], "driver": {"kind": "csv", "path": "first.csv", "columns": ["H1"]}})");
    REQUIRE(run_simulate({dir / "again.json", dir, std::nullopt, false, true}, out, err) == kExitOk);
    const auto a = read_csv(dir / "first.csv");
    const auto b = read_csv(dir / "trajectory.csv");
    CHECK(a.body == b.body);
  }

  TEST_CASE("config errors exit with 2") {
    const auto dir = scratch("bad");
    std::ostringstream out, err;
    write_file(dir, "missing.json", R"({"scheme": "catching_up", "initial": [0]})");
    CHECK(run_simulate({dir / "missing.json", dir, std::nullopt, false, true}, out, err) == kExitConfig);
    CHECK(err.str().find("set") != std::string::npos);

    write_file(dir, "syntax.json", "{ not json");
    CHECK(run_simulate({dir / "syntax.json", dir, std::nullopt, false, true}, out, err) == kExitConfig);

    write_file(dir, "scheme.json", R"({"scheme": "implicit", "set": {"family": "ball", "params": {"center": [0], "radius": 1}}, "initial": [0]})");
    CHECK(run_simulate({dir / "scheme.json", dir, std::nullopt, false, true}, out, err) == kExitConfig);

    write_file(dir, "shape.json", R"({"scheme": "picard_young", "set": {"family": "ball", "params": {"center": [0, 0], "radius": 1}},
      "initial": [0, 0], "field": {"kind": "constant", "value": [[1, 2, 3]]}})");
    CHECK(run_simulate({dir / "shape.json", dir, std::nullopt, false, true}, out, err) == kExitConfig);

    CHECK(run_simulate({dir / "nope.json", dir, std::nullopt, false, true}, out, err) == kExitConfig);
  }

  TEST_CASE("solver errors exit with 3") {
    const auto dir = scratch("solver");
    std::ostringstream out, err;
    write_file(dir, "far.json", R"({"scheme": "catching_up", "set": {"family": "ball", "params": {"center": [0], "radius": 1}}, "initial": [4]})");
    CHECK(run_simulate({dir / "far.json", dir, std::nullopt, false, true}, out, err) == kExitSolver);

    write_file(dir, "slow.json", R"({"scheme": "picard_young", "n": 32, "max_iter": 2,
      "set": {"family": "box", "params": {"lower": [0], "upper": ["inf"]}, "gamma": [1], "r": 1},
      "initial": [0], "field": {"kind": "scalar-trig", "amplitude": 0.2},
      "driver": {"kind": "analytic", "name": "linear"}, "tolerances": {"tol": 1e-14}})");
    CHECK(run_simulate({dir / "slow.json", dir, std::nullopt, true, true}, out, err) == kExitSolver);
    CHECK(run_simulate({dir / "slow.json", dir, std::nullopt, false, true}, out, err) == kExitOk);
  }

  TEST_CASE("environment override of the projection tolerance") {
    const auto dir = scratch("env");
    write_file(dir, "c.json", R"({"scheme": "catching_up", "n": 4,
      "set": {"family": "ball", "params": {"center": [0], "radius": 1}}, "initial": [1.0000001]})");
    std::ostringstream out, err;
    CHECK(run_simulate({dir / "c.json", dir, std::nullopt, false, true}, out, err) == kExitSolver);
    ::setenv("SWEEP_PROJ_TOL", "1e-3", 1);
    CHECK(run_simulate({dir / "c.json", dir, std::nullopt, false, true}, out, err) == kExitOk);
    ::setenv("SWEEP_PROJ_TOL", "bogus", 1);
    CHECK(run_simulate({dir / "c.json", dir, std::nullopt, false, true}, out, err) == kExitConfig);
    ::unsetenv("SWEEP_PROJ_TOL");
  }

  TEST_CASE("converge command") {
    const auto dir = scratch("converge");
    write_file(dir, "trivial.json", R"({"scheme": "euler",
      "set": {"family": "box", "params": {"lower": [0, 0], "upper": [1, 1]}},
      "initial": [0.5, 0.5], "levels": [8, 16, 32]})");
    std::ostringstream out, err;
    REQUIRE(run_converge({dir / "trivial.json", dir, std::nullopt, false, true}, {}, out, err) == kExitOk);
    const auto t = read_csv(dir / "converge.csv");
    CHECK(t.header == std::vector<std::string>{"n", "sup_gap", "ratio"});
    REQUIRE(t.body.rows() == 2);
    CHECK(t.body.col(1).norm() == 0.0);
    bool summary = false;
    for (const auto& m : t.metadata) summary |= m.find("empirical_order") != std::string::npos;
    CHECK(summary);

    REQUIRE(run_converge({dir / "trivial.json", dir, std::nullopt, false, true}, {64}, out, err) == kExitOk);
    CHECK(read_csv(dir / "converge.csv").body.rows() == 0);
    CHECK(run_converge({dir / "trivial.json", dir, std::nullopt, false, true}, {8, 12}, out, err) == kExitConfig);

    write_file(dir, "fou.json", R"({"scheme": "euler", "seed": 4,
      "set": {"family": "box", "params": {"lower": [0], "upper": [1]}},
      "initial": [0.5], "field": {"kind": "linear", "constant": [[0]], "slopes": [[[-1]]]},
      "driver": {"kind": "fbm", "hurst": 0.7, "scale": 0.3}})");
    std::ostringstream o2;
    REQUIRE(run_converge({dir / "fou.json", dir, std::nullopt, false, true}, {128, 256, 512, 1024}, o2, err) == kExitOk);
    const auto f = read_csv(dir / "converge.csv");
    for (Eigen::Index r = 0; r + 1 < f.body.rows(); ++r) CHECK(f.body(r + 1, 1) < f.body(r, 1));
  }

  TEST_CASE("theory order") {
    auto cfg = parse_config(R"({"scheme": "euler", "set": {"family": "ball", "params": {"center": [0], "radius": 1}},
      "initial": [0], "driver": {"kind": "fbm", "hurst": 0.7}})");
    CHECK(cfg.theory_order() == doctest::Approx(1.0 / (1.0 / 0.7 + 0.01)));
    cfg = parse_config(R"({"scheme": "euler", "set": {"family": "ball", "params": {"center": [0], "radius": 1},
      "motion": {"kind": "linear", "velocity": [1]}, "hoelder": {"K": 1, "alpha": 0.5}}, "initial": [0]})");
    CHECK(cfg.theory_order() == 0.5);
  }

  TEST_CASE("fbm and pvar commands") {
    const auto dir = scratch("fbm");
    std::ostringstream out, err;
    FbmOptions o;
    o.spec = {0.7, 1.0, 64, 2, 17};
    o.out = dir;
    o.repro = true;
    o.file = "a.csv";
    REQUIRE(run_fbm(o, out, err) == kExitOk);
    o.file = "b.csv";
    REQUIRE(run_fbm(o, out, err) == kExitOk);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    const auto t = read_csv(dir / "a.csv");
    CHECK(t.header == std::vector<std::string>{"t", "B1", "B2"});
    CHECK(t.body.rows() == 65);
    o.spec.hurst = 0.2;
    CHECK(run_fbm(o, out, err) == kExitConfig);

    write_file(dir, "p.csv", "t,x\n0,0\n0.5,1\n1,0\n");
    std::ostringstream p1, p2;
    REQUIRE(run_pvar({dir / "p.csv", 1.0, {}}, p1, err) == kExitOk);
    CHECK(p1.str().rfind("2\n", 0) == 0);
    REQUIRE(run_pvar({dir / "p.csv", 2.0, {"x"}}, p2, err) == kExitOk);
    CHECK(std::strtod(p2.str().c_str(), nullptr) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p2.str().find("dissection 0 1 2") != std::string::npos);
    write_file(dir, "broken.csv", "t,x\n0,zero\n");
    CHECK(run_pvar({dir / "broken.csv", 1.0, {}}, p1, err) == kExitConfig);
  }

  TEST_CASE("simulate is deterministic under --repro") {
    const auto dir = scratch("repro");
    write_file(dir, "c.json", R"({"scheme": "picard_rough", "n": 128, "seed": 9,
      "set": {"family": "polytope", "params": {"normals": [[1, 0], [0, 1], [-1, -1]], "offsets": [1, 1, 1]},
              "motion": {"kind": "sine", "amplitude": [0.1, 0.0], "frequency": 1}},
      "initial": [0, 0], "field": {"kind": "constant", "value": [[0.2, 0], [0, 0.2]]},
      "driver": {"kind": "fbm", "hurst": 0.45, "dims": 2}})");
    std::ostringstream out, err;
    REQUIRE(run_simulate({dir / "c.json", dir / "a", std::nullopt, false, true}, out, err) == kExitOk);
    REQUIRE(run_simulate({dir / "c.json", dir / "b", std::nullopt, false, true}, out, err) == kExitOk);
    CHECK(read_file(dir / "a" / "trajectory.csv") == read_file(dir / "b" / "trajectory.csv"));
    REQUIRE(run_simulate({dir / "c.json", dir / "c", std::nullopt, false, false}, out, err) == kExitOk);
    CHECK(body_of(read_file(dir / "a" / "trajectory.csv")) == body_of(read_file(dir / "c" / "trajectory.csv")));
    REQUIRE(run_simulate({dir / "c.json", dir / "d", std::uint64_t{10}, false, true}, out, err) == kExitOk);
    CHECK(body_of(read_file(dir / "a" / "trajectory.csv")) != body_of(read_file(dir / "d" / "trajectory.csv")));
  }
}
