#include <doctest.h>

#include <cmath>
#include <sstream>

#include "uip/chain.hpp"
#include "uip/error.hpp"
#include "uip/harness.hpp"

using namespace uip;

namespace {

Scenario small(std::vector<Method> methods, long reps = 20) {
  Scenario s;
  s.current = {0.0, 1.0, 30};
  s.historical = {{0.5, 1.0, 60}};
  s.methods = std::move(methods);
  s.replications = reps;
  s.master_seed = 3;
  s.grid = {0.0, 0.5};
  s.chain.iterations = 2000;
  s.chain.burn_in = 1000;
  return s;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no uip::Error thrown");
  return Errc::ConfigError;
}

}  // namespace

TEST_CASE("critical level") {
  std::vector<double> x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i) / 1000.0;
  CHECK(critical_level(x, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(critical_level(x, 0.1) == doctest::Approx(0.8).epsilon(1e-3));
  CHECK(critical_level(x, -1.0) > 1.0);
}

TEST_CASE("critical level calibration") {
  std::vector<double> c;
  for (int i = 1; i <= 100; ++i) c.push_back(i / 100.0);
  CHECK(calibrate_level(c, 0.05) == 0.95);
  CHECK(calibrate_level(c, 0.10, 0.95) == doctest::Approx(0.90).epsilon(1e-9));
  CHECK(calibrate_level(c, 0.05, 0.90) == doctest::Approx(0.95).epsilon(1e-9));
  const std::vector<double> zeros(10, 0.0);
  CHECK(calibrate_level(zeros, 0.05, 0.9) == 0.0);
  std::vector<double> wild(10, 2.0);
  CHECK(code_of([&] { calibrate_level(wild, 0.05); }) == Errc::Uncalibratable);
  CHECK(code_of([&] { calibrate_level(std::vector<double>{}, 0.05); }) == Errc::EmptyChain);
  CHECK(code_of([&] { calibrate_level(c, 1.5); }) == Errc::BadLevel);
}

TEST_CASE("scenario validation") {
  const Scenario ok = small({Method::Jeffreys});
  CHECK_NOTHROW(ok.validate());
  Scenario s = ok;
  s.grid.clear();
  CHECK(code_of([&] { s.validate(); }) == Errc::ConfigError);
  s = ok;
  s.methods.clear();
  CHECK(code_of([&] { s.validate(); }) == Errc::ConfigError);
  s = ok;
  s.historical.clear();
  CHECK(code_of([&] { s.validate(); }) == Errc::ConfigError);
  s = ok;
  s.replications = 0;
  CHECK(code_of([&] { s.validate(); }) == Errc::ConfigError);
  s = ok;
  s.historical[0].sd = 0.0;
  CHECK(code_of([&] { s.validate(); }) == Errc::ConfigError);
  s = ok;
  s.kind = EndpointKind::Binary;
  s.grid = {1.5};
  CHECK(code_of([&] { s.validate(); }) == Errc::ConfigError);
  EssStudy e;
  e.m_grid = {};
  CHECK(code_of([&] { e.validate(); }) == Errc::ConfigError);
}

TEST_CASE("simulation is deterministic and rates are proportions") {
  const Scenario s = small({Method::Jeffreys, Method::UipJs, Method::Mpp});
  const ScenarioResult a = run_test(s, 0.0);
  const ScenarioResult b = run_test(s, 0.0);
  std::ostringstream ca, cb;
  write_csv(a, ca);
  write_csv(b, cb);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("grid_value,method,metric,mean,lo95,hi95,n_reps\n", 0) == 0);
  for (const auto& r : a.rows) {
    CHECK(r.mean >= 0.0);
    CHECK(r.mean <= 1.0);
    CHECK(r.n_reps == 20);
  }
  Scenario other = s;
  other.master_seed = 4;
  std::ostringstream co;
  write_csv(run_test(other, 0.0), co);
  CHECK(co.str() != ca.str());

  Scenario threaded = s;
  threaded.threads = 2;
  std::ostringstream ct;
  write_csv(run_test(threaded, 0.0), ct);
  CHECK(ct.str() == ca.str());
}

TEST_CASE("shared chain seeds: testing H0 at the truth reproduces the size curve") {
  const Scenario s = small({Method::Jeffreys, Method::UipDirichlet});
  const auto cube = simulate_outcomes(s, 0.0);
  REQUIRE(cube.size() == 2);
  for (std::size_t mi = 0; mi < 2; ++mi)
    for (const auto& o : cube[0][mi]) CHECK(o.level_truth == o.level_theta0);
  const ScenarioResult size = run_test(s, std::nullopt);
  const ScenarioResult power = run_test(s, 0.0);
  CHECK(size.series("jeffreys", "reject")[0].mean == power.series("jeffreys", "reject")[0].mean);
}

TEST_CASE("estimation metrics") {
  Scenario s = small({Method::Jeffreys, Method::FullBorrow}, 40);
  const ScenarioResult r = run_estimation(s);
  for (const auto& row : r.series("jeffreys", "mse")) CHECK(row.mean == doctest::Approx(1.0 / 30).epsilon(0.6));
  const auto bias = r.series("full_borrow", "abs_bias");
  REQUIRE(bias.size() == 2);
  CHECK(bias[0].mean > bias[1].mean);
  const auto var_j = r.series("jeffreys", "variance");
  const auto var_f = r.series("full_borrow", "variance");
  CHECK(var_f[0].mean < var_j[0].mean);
}

TEST_CASE("trend metrics are reported for uip methods") {
  Scenario s = small({Method::UipDirichlet, Method::UipJs}, 5);
  s.historical = {{-0.3, 1.0, 40}, {0.3, 1.0, 40}};
  s.grid = {-0.3, 0.3};
  const ScenarioResult r = run_trend(s);
  const auto w1 = r.series("uip_js", "w1");
  REQUIRE(w1.size() == 2);
  CHECK(w1[0].mean > w1[1].mean);
  CHECK_FALSE(r.series("uip_dirichlet", "M").empty());
  CHECK(code_of([&] { run_trend(small({Method::Mpp}, 2)); }) == Errc::ConfigError);
}

TEST_CASE("testing study calibration") {
  const Scenario s = small({Method::Jeffreys, Method::FullBorrow}, 30);
  std::map<Method, Calibration> cal;
  const ScenarioResult r = run_testing_study(s, 0.0, 0.95, 0.05, &cal);
  REQUIRE(cal.count(Method::Jeffreys));
  CHECK(cal.at(Method::Jeffreys).level);
  CHECK(cal.at(Method::Jeffreys).nominal_size <= 0.2);
  CHECK_FALSE(r.series("jeffreys", "size").empty());
  CHECK_FALSE(r.series("jeffreys", "power_calibrated").empty());
  // history centred at 0.5 pulls every full-borrowing interval away from the null
  CHECK_FALSE(cal.at(Method::FullBorrow).level);
  CHECK(r.series("full_borrow", "power_calibrated").empty());
  CHECK(std::isnan(r.series("full_borrow", "calibrated_level").at(0).mean));
  CHECK(code_of([&] { run_testing_study(s, 0.25, 0.95, 0.05); }) == Errc::ConfigError);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0, 2.5})
    CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
}
