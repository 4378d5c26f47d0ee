#include "doctest.h"

#include <string>

#include "cbfsim/config.hpp"

using namespace cbfsim;

namespace {

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST_CASE("every preset validates and round-trips") {
  const auto names = preset_names();
  CHECK(names.size() == 9);
  for (const auto& name : names) {
    CAPTURE(name);
    const Config c = preset(name);
    CHECK(c.name == name);
    CHECK_NOTHROW(c.validate());
    const Config again = parse_config(dump_config(c));
    CHECK(again == c);
    CHECK(dump_config(again) == dump_config(c));
  }
  CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
}

TEST_CASE("defaults fill an almost empty document") {
  const Config c = parse_config(R"({"initial_state": [0, 0], "controllers": [{"kind": "cbf"}]})");
  CHECK(c.plant == PlantKind::kPendulum);
  CHECK(c.horizon == 40.0);
  CHECK(c.dt == 0.01);
  CHECK(c.alpha_c() == 0.2);
  CHECK(c.certify.d_range.lower == 0.0);
  CHECK(c.certify.d_range.upper == 100.0);
  CHECK_FALSE(c.delta.has_value());
}

TEST_CASE("unknown keys and wrong types report their path") {
  CHECK(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "cbf"}], "horizn": 3})") == "$.horizn");
  CHECK(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "cbf"}, {"kind": "issf", "epsilon0": 1}]})") ==
        "$.controllers[1].epsilon0");
  CHECK(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "cbf"}], "dt": "fast"})") == "$.dt");
  CHECK(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "pid"}]})") == "$.controllers[0].kind");
  CHECK(error_path(R"({"plant": "boat"})") == "$.plant");
  CHECK(error_path("{not json") == "$");
}

TEST_CASE("semantic validation") {
  CHECK_FALSE(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "issf", "eps0": -1}]})").empty());
  CHECK_FALSE(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "cbf"}], "dt": 0})").empty());
  CHECK_FALSE(error_path(R"({"initial_state": [0, 0, 0], "controllers": [{"kind": "cbf"}]})").empty());
  CHECK_FALSE(error_path(R"({"plant": "truck", "initial_state": [27.4, 16, 16], "controllers": [{"kind": "cbf"}],
      "leader": {"kind": "hard_brake", "a_peak": -12}})")
                  .empty());
  CHECK_FALSE(error_path(R"({"initial_state": [0, 0], "controllers": [{"kind": "cbf"}], "delta": -1})").empty());
}

TEST_CASE("effective delta") {
  CHECK(preset("pendulum-fig5").effective_delta() == 0.75);
  CHECK(preset("truck-table-3").effective_delta() == 4.5);
  Config c = preset("pendulum-fig2");
  CHECK(c.effective_delta() == 0.0);
}

TEST_CASE("build_scenarios produces one scenario per controller") {
  const Config c = preset("pendulum-fig5");
  const auto scenarios = build_scenarios(c);
  REQUIRE(scenarios.size() == 4);
  CHECK(scenarios[0].name == "pendulum-fig5_cbf");
  CHECK(scenarios[1].name == "pendulum-fig5_issf-black");
  CHECK(scenarios[1].controller.eps0 == 0.15);
  CHECK(scenarios[2].controller.lambda == 12.0);
  CHECK(scenarios[0].disturbance.bound() == 0.75);

  const auto truck = build_scenarios(preset("truck-fig11"));
  REQUIRE(truck.size() == 3);
  CHECK(truck[0].disturbance.kind() == DisturbanceSignal::Kind::kLagResidual);
  CHECK(truck[0].disturbance.bound() <= 4.5);
  CHECK(truck[2].delta == 4.5);
}
