#include <doctest.h>

#include "plimit/error.hpp"
#include "plimit/experiments.hpp"
#include "plimit/suite.hpp"

using namespace plimit;
using nlohmann::json;

TEST_CASE("suite config: empty is rejected, partial overrides merge") {
  CHECK_THROWS_AS(SuiteConfig::from_json(json::object()), InvalidArgument);
  CHECK_THROWS_AS(SuiteConfig::from_json(json::array()), InvalidArgument);
  CHECK_THROWS_AS(SuiteConfig::from_json(json{{"bogus", 1}}), InvalidArgument);
  CHECK_THROWS_AS(SuiteConfig::from_json(json{{"example1", {{"tau", 1e-3}, {"dt", 1}}}}), InvalidArgument);
  const auto c = SuiteConfig::from_json(json{{"example1", {{"tau", 2e-3}}}});
  CHECK(c.ex1_tau == 2e-3);
  CHECK(c.ex1_T == SuiteConfig{}.ex1_T);
  CHECK(SuiteConfig::from_json(c.to_json()).to_json() == c.to_json());
  auto few = SuiteConfig{};
  few.property_cases = 10;
  CHECK_THROWS_AS(few.validate(), InvalidArgument);
}

TEST_CASE("criterion records") {
  CHECK_THROWS_AS(run_criterion(0, SuiteConfig{}), InvalidArgument);
  const auto r = run_criterion(2, SuiteConfig{});
  CHECK(r.pass());
  CHECK(r.error.empty());
  const auto j = to_json(r);
  CHECK(j.at("id") == 2);
  CHECK(j.at("pass") == true);
  CHECK(r.line().find("criterion 2") == 0);
}

TEST_CASE("example 1 error is round-off at two step sizes") {
  // The limit flow on the interval is reproduced to round-off, so both
  // errors stay far below the criterion threshold.
  for (double tau : {1e-3, 2e-3}) {
    auto o = ExampleOptions::preset(1);
    o.tau = tau;
    const auto run = run_example(o);
    CHECK(run.summary.at("sup_error").get<double>() <= 1e-12);
  }
}

TEST_CASE("example presets") {
  const auto run = run_example(ExampleOptions::preset(2));
  CHECK(run.summary.at("switch_time_detected").get<double>() == doctest::Approx(1.3).epsilon(1e-3));
  CHECK(run.flow.size() == run.exact.size());
  CHECK_THROWS_AS(ExampleOptions::preset(4), InvalidArgument);
  auto bad = ExampleOptions::preset(2);
  bad.u0 = {2.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ExampleOptions::preset(3);
  bad.h = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("example 3 mass identity") {
  auto o = ExampleOptions::preset(3);
  o.h = 0.1;
  o.T = 1.0;
  const auto run = run_example(o);
  CHECK(run.summary.at("mass_identity_relative_error").get<double>() <= 1e-2);
  CHECK(run.summary.at("gamma_measure").get<double>() == doctest::Approx(1.0));
}
