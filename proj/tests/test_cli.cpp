#include <cmath>

#include "doctest.h"
#include "wermer/suite.hpp"

using namespace wermer;

namespace {

const char* kDivergent =
    "schedule.r = 1/10, exp(-4), exp(-8), exp(-16), exp(-32), exp(-64)\n"
    "schedule.m = 1\n"
    "schedule.depth = 6\n";

}  // namespace

TEST_CASE("config defaults and parsing") {
  const RunConfig d = parse_config("");
  CHECK(d.depth == 2);
  CHECK(d.m.size() == 2);
  CHECK(d.r[0] == RadiusFactor::rational(1, 10));
  CHECK(d.plane.z0 == Complex<double>(0.4, 0));

  const RunConfig c = parse_config(
      "# comment\n"
      "schedule.r = 1/10\n"
      "schedule.m = 1, 4, 2^70   # trailing comment\n"
      "schedule.depth = 3\n"
      "schedule.delta_offset = 2:13.8\n"
      "schedule.verify = false\n"
      "anchors.seed = 42\n"
      "plane.gamma_im = 0.005\n"
      "dimension.depths = 1,3\n"
      "out = /tmp/x\n");
  CHECK(c.m[2] == Multiplicity::power_of_two(70));
  CHECK(c.delta_log_offset.at(2) == 13.8);
  CHECK_FALSE(c.verify);
  CHECK(c.seed == 42);
  CHECK(c.plane.gamma == Complex<double>(0, 0.005));
  CHECK(c.dimension_depths == std::vector<int>{1, 3});
  CHECK(c.out == "/tmp/x");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("schedule.x = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("depth = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("schedule.depth = 1\nschedule.depth = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("schedule.depth = two"), ConfigError);
  CHECK_THROWS_AS(parse_config("schedule.depth = -1"), ConfigError);
  CHECK_THROWS_AS(parse_config("schedule.m = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("schedule.verify = maybe"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid.size"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/wermer.cfg"), ConfigError);
}

TEST_CASE("config hash") {
  const RunConfig a = parse_config("");
  RunConfig b = a;
  b.out = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(parse_config(canonical_config(b))) == config_hash(b));
}

TEST_CASE("failure records") {
  const FailureRecord f{"est1", "schedule", "n=1", "-0.5", "0"};
  CHECK(f.str() == "invariant=est1 module=schedule location=n=1 measured=-0.5 bound=0");
  const auto g = failure_from(CertificationFailure("x", "0 3#1", -0.25, "nesting_margin"));
  CHECK(g.invariant == "nesting_margin");
  CHECK(g.module == "slicer");
  CHECK(g.str() == "invariant=nesting_margin module=slicer location=0_3#1 measured=-0.25 bound=0");
  CHECK(failure_from(InvalidSchedule(2, "est2", "y")).location == "n=2");
}

TEST_CASE("m_to_depth") {
  CHECK(m_to_depth({1, 4}, 4) == std::vector<Multiplicity>{1, 4, 4, 4});
  CHECK(m_to_depth({1, 4, 16}, 2).size() == 3);
  CHECK_THROWS_AS(m_to_depth({}, 2), InvalidArgument);
}

TEST_CASE("schedule command flags a divergent tail without failing") {
  const auto res = cmd_schedule(parse_config(kDivergent), 1);
  CHECK(res.ok());
  const auto& csv = res.artifacts.at("schedule.csv");
  CHECK(csv.find("# tail_converges=false") != std::string::npos);
  CHECK(csv.find("tail_diverges") != std::string::npos);
  CHECK(csv.rfind("# config_hash=", 0) == 0);
}

TEST_CASE("certify names est1 on a corrupted schedule") {
  const auto bad = parse_config("schedule.delta_offset = 2:13.8\nschedule.verify = false\n");
  const auto res = cmd_certify(bad, 1);
  REQUIRE(res.failures.size() == 1);
  CHECK(res.failures[0].invariant == "est1");
  CHECK(res.failures[0].location == "n=2");  // the step producing delta_2
  CHECK(res.artifacts.empty());
  // Building the same schedule with verification on fails the same way.
  const auto strict = cmd_certify(parse_config("schedule.delta_offset = 2:13.8\n"), 1);
  REQUIRE(strict.failures.size() == 1);
  CHECK(strict.failures[0].invariant == "est1");
}

TEST_CASE("commands on the default config") {
  const RunConfig c = parse_config("raster.width = 32\nraster.height = 32\n");
  const auto cert = cmd_certify(c, 2);
  CHECK(cert.ok());
  CHECK(cert.artifacts.size() == 2);
  const auto m = cmd_measure(c, 2);
  CHECK(m.ok());
  CHECK(m.artifacts.at("measure_2.csv").find("# total=1") != std::string::npos);
  const auto r = cmd_render(c, 2);
  CHECK(r.ok());
  CHECK(r.artifacts.at("escape.pgm").rfind("P5\n", 0) == 0);
  const auto cap = cmd_capacity(c, 1);
  CHECK(cap.ok());
  const auto g = cmd_gauge(parse_config("gauge.h_power = 1\n"), 1);
  REQUIRE(g.failures.size() == 1);
  CHECK(g.failures[0].invariant == "DivergentGauge");
  // Identical artifacts across worker counts.
  CHECK(cmd_roots(c, 1).artifacts == cmd_roots(c, 5).artifacts);
  CHECK(cmd_render(c, 1).artifacts == r.artifacts);
}
