#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "uip/error.hpp"
#include "uip/random.hpp"
#include "uip/regression.hpp"

using namespace uip;

namespace {

ChainConfig chain(std::uint64_t seed, long iterations = 20000) {
  ChainConfig c;
  c.iterations = iterations;
  c.burn_in = iterations / 2;
  c.seed = seed;
  return c;
}

RegressionOptions quick(std::vector<Method> methods) {
  RegressionOptions o;
  o.methods = std::move(methods);
  o.chain = chain(17, 6000);
  o.ess_mc_draws = 1000;
  return o;
}

}  // namespace

TEST_CASE("separate fit matches the known-variance bivariate normal posterior") {
  const TwoArmGroupStats s{ContinuousSummary(200, 1.5, 2.0), ContinuousSummary(180, 0.5, 2.2)};
  const StudyFit f = fit_separate(s, chain(3), "S");
  const double s2 = (199 * 4.0 + 179 * 4.84) / (380 - 2);
  const auto oracle_post = oracle::two_arm_slope_posterior(200, 1.5, 180, 0.5, s2, 100.0);
  CHECK(f.label == "S");
  CHECK(f.n == 380);
  CHECK(std::fabs(f.beta1.estimate - oracle_post.mean) < 0.05 * std::sqrt(oracle_post.var));
  CHECK(f.beta1.sd == doctest::Approx(std::sqrt(oracle_post.var)).epsilon(0.05));
  CHECK(f.beta0.estimate == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("symmetric arms give a slope near zero") {
  const TwoArmGroupStats s{ContinuousSummary(100, 0.8, 1.0), ContinuousSummary(100, 0.8, 1.0)};
  const StudyFit f = fit_separate(s, chain(4));
  CHECK(std::fabs(f.beta1.estimate) < 0.1 * f.beta1.sd);
  CHECK(f.beta1.lower < 0.0);
  CHECK(f.beta1.upper > 0.0);
}

TEST_CASE("slope info modes") {
  CHECK(parse_slope_info(to_string(SlopeInfo::Observed)) == SlopeInfo::Observed);
  CHECK(parse_slope_info(to_string(SlopeInfo::InverseVariance)) == SlopeInfo::InverseVariance);
  CHECK_THROWS_AS(parse_slope_info("other"), Error);
}

TEST_CASE("regression analysis") {
  const TwoArmGroupStats cur{ContinuousSummary(60, 1.0, 1.5), ContinuousSummary(60, 0.2, 1.5)};
  const StudySet same({"cur", cur}, {{"h1", cur}, {"h2", cur}});
  const RegressionReport r = analyze_regression(same, quick({Method::UipJs, Method::UipDirichlet, Method::Mpp}));
  REQUIRE(r.separate.size() == 3);
  REQUIRE(r.borrowing.size() == 3);
  CHECK(r.current_label == "cur");
  CHECK(r.historical_labels == std::vector<std::string>{"h1", "h2"});
  const double width0 = r.separate[0].beta1.upper - r.separate[0].beta1.lower;
  for (const auto& m : r.borrowing) {
    CHECK(m.beta1.upper - m.beta1.lower < width0);
    CHECK(std::fabs(m.beta1.estimate - 0.8) < 0.15);
  }
  const auto& js = r.borrowing[0];
  REQUIRE(js.weights);
  REQUIRE(js.js_distances);
  CHECK(js.weights->sum() == doctest::Approx(1.0));
  CHECK(js.js_distances->maxCoeff() < 0.01);
  CHECK(js.m_mean);
  CHECK(js.ess);
  CHECK_FALSE(r.borrowing[2].weights);

  std::ostringstream j;
  write_json(r, j);
  const auto doc = nlohmann::json::parse(j.str());
  CHECK(doc["separate"].size() == 3);
  CHECK(doc["borrowing"][0]["method"] == "uip_js");
  CHECK(doc["borrowing"][0].contains("weights"));
  CHECK(doc["borrowing"][0]["beta1"].contains("lower"));

  std::ostringstream c;
  write_csv(r, c);
  std::istringstream lines(c.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "section,name,parameter,estimate,lower,upper,sd");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  CHECK(rows == 2 * 3 + 2 * 3);
}

TEST_CASE("regression requires two-arm studies") {
  const TwoArmGroupStats cur{ContinuousSummary(60, 1.0, 1.5), ContinuousSummary(60, 0.2, 1.5)};
  const StudySet mixed({"cur", cur}, {{"c", CoefficientSummary(0.5, 0.3, 100)}});
  CHECK_THROWS_AS(fit_all(mixed, quick({Method::UipJs})), Error);
}

TEST_CASE("fit seeds follow the study index") {
  const TwoArmGroupStats a{ContinuousSummary(60, 1.0, 1.5), ContinuousSummary(60, 0.2, 1.5)};
  const StudySet s({"cur", a}, {{"h", a}});
  const RegressionOptions o = quick({Method::UipJs});
  const auto fits = fit_all(s, o);
  ChainConfig c1 = o.chain;
  c1.seed = derive_seed(o.chain.seed, 1);
  CHECK(fits[1].beta1.estimate == fit_separate(a, c1, "h").beta1.estimate);
  CHECK(fits[0].beta1.estimate != fits[1].beta1.estimate);
  const DistanceReport d = slope_js_distances(fits[0], std::span<const StudyFit>(fits).subspan(1));
  CHECK(d.d(0) < 0.01);
}
