#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "sdllb/config.hpp"
#include "sdllb/errors.hpp"

using namespace sdllb;

TEST_CASE("the disk preset carries the hot-magnet parameter block") {
  SimConfig c = config_from_json_text(R"({"preset":"sim1"})", "inline");
  CHECK(c.domain == Mesh::Domain::Disk);
  CHECK(c.coeff.gamma == 2.3e6);
  CHECK(c.coeff.alpha == 1.0e5);
  CHECK(c.coeff.gamma_prime == 3.0e-3);
  CHECK(c.coeff.alpha_prime == 1.0e-6);
  CHECK(c.coeff.kappa == 1.0e-9);
  CHECK(c.coeff.mu == 1.0e4);
  CHECK(eval(c.coeff.D0, 0.2, -0.3, 0) == 1.0e-2);
  CHECK(c.coeff.tau_sf == 1.0e-7);
  CHECK(c.coeff.tau_j == 5.0e-8);
  CHECK(c.coeff.beta == 0.1);
  CHECK(c.coeff.beta_prime == 1.0e-5);
  CHECK(eval(c.coeff.j.components[0], 0.5, 0.5, 0) == 0.0);
  CHECK(eval(c.coeff.j.components[1], 0.5, 0.5, 0) == 2.0e8);
  CHECK(c.k == 1.0e-7);
  CHECK(c.T == 5.0e-6);
  auto m0 = c.m0.eval_at(0.5, -0.25, 0);
  CHECK(m0[0] == doctest::Approx(0.025));
  CHECK(m0[1] == doctest::Approx(0.05));
}

TEST_CASE("the cold-magnet preset flips mu and the current direction") {
  SimConfig c = config_from_json_text(R"({"preset":"sim3"})", "inline");
  CHECK(c.domain == Mesh::Domain::Square);
  CHECK(c.coeff.mu == -1.0e4);
  CHECK(c.coeff.beta == 0.2);
  CHECK(eval(c.coeff.j.components[0], 0, 0, 0) == 1.0e6);
  CHECK(eval(c.coeff.j.components[1], 0, 0, 0) == 0.0);
  CHECK(eval(c.coeff.D0, 0, 0, 0) == 2.0e-2);
  CHECK(c.coeff.tau_sf == 2.0e-7);
}

TEST_CASE("an empty config is rejected for the missing domain") {
  try {
    config_from_json_text("{}", "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "domain");
  }
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK_THROWS_AS(config_from_json_text(R"({"preset":"sim1","frobnicate":1})", "inline"),
                  ConfigError);
  try {
    config_from_json_text(R"({"preset":"sim1","coefficients":{"foo":2}})", "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "coefficients.foo");
  }
}

TEST_CASE("explicit keys override the preset") {
  SimConfig c = config_from_json_text(
      R"({"preset":"sim2","k":5e-9,"degree":2,"coefficients":{"beta":0.3}})", "inline");
  CHECK(c.k == 5e-9);
  CHECK(c.degree == 2);
  CHECK(c.coeff.beta == 0.3);
  CHECK(c.coeff.gamma == 2.3e6);  // untouched preset value
}

TEST_CASE("desk presets cap the horizon at 500 steps") {
  SimConfig c2 = config_from_json_text(R"({"preset":"sim2_desk"})", "inline");
  CHECK(c2.k == 1.0e-9);
  CHECK(c2.T == doctest::Approx(500.0 * 1.0e-9));
  for (double t : c2.snapshot_times) CHECK(t <= c2.T * (1 + 1e-12));

  // the disk run is already shorter than 500 steps
  SimConfig c1 = config_from_json_text(R"({"preset":"sim1_desk"})", "inline");
  CHECK(c1.T == 5.0e-6);
}

TEST_CASE("the unit preset still needs problem data") {
  CHECK_THROWS_AS(config_from_json_text(R"({"preset":"unit"})", "inline"), ConfigError);
  SimConfig c = config_from_json_text(
      R"json({"preset":"unit","domain":"square","k":1e-3,"T":1e-2,
          "m0":["0.1*sin(pi*x)","0","0"],"s0":["0","0","0"]})json",
      "inline");
  CHECK(c.coeff.gamma == 1.0);
  CHECK(c.coeff.beta == 0.1);
  CHECK(eval(c.coeff.D0, 0.3, 0.4, 0) == 1.0);
}

TEST_CASE("validation failures carry key paths") {
  auto expect_path = [](const char* text, const std::string& path) {
    try {
      config_from_json_text(text, "inline");
      FAIL_CHECK("expected ConfigError for " << path);
    } catch (const ConfigError& e) {
      CHECK(e.path() == path);
    }
  };
  expect_path(R"({"preset":"sim1","k":-1})", "k");
  expect_path(R"({"preset":"sim1","coefficients":{"beta":1.5}})", "coefficients.beta");
  expect_path(R"({"preset":"sim1","coefficients":{"alpha":-2}})", "coefficients.alpha");
  expect_path(R"({"preset":"sim1","degree":3})", "degree");
  expect_path(R"({"preset":"sim1","trace_every":0})", "trace_every");
  expect_path(R"({"preset":"nope"})", "preset");
  expect_path(R"({"preset":"sim1","m0":["x","y"]})", "m0");
}

TEST_CASE("expression errors are reported at the offending key") {
  try {
    config_from_json_text(R"({"preset":"sim1","m0":["x+","0","0"]})", "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "m0[0]");
  }
}

TEST_CASE("mesh mapping follows the nominal resolution ladder") {
  SimConfig c = config_from_json_text(R"({"preset":"sim2"})", "inline");
  CHECK(c.nominal_one_over_h() == 8);
  CHECK(c.nominal_one_over_h(2) == 32);
  Mesh m = mesh_for(c);
  CHECK(m.triangle_count() == 2 * 16 * 16);  // n = 2 * (1/h)

  SimConfig d = config_from_json_text(R"({"preset":"sim1"})", "inline");
  CHECK(d.nominal_one_over_h() == 8);  // disk level 3
  Mesh dm = mesh_for(d);
  CHECK(dm.triangle_count() == 6 * 4 * 4 * 4);
}

TEST_CASE("config files load from disk") {
  const char* path = "test_config_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"preset":"sim2_desk","trace_every":10})";
  }
  SimConfig c = load_config(path);
  CHECK(c.trace_every == 10);
  CHECK(c.preset == "sim2_desk");
  std::remove(path);
  CHECK_THROWS_AS(load_config("does_not_exist.json"), ConfigError);
}

TEST_CASE("malformed JSON is a config error") {
  CHECK_THROWS_AS(config_from_json_text("{", "inline"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("[1,2]", "inline"), ConfigError);
}
