#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "uip/error.hpp"
#include "uip/js_weights.hpp"
#include "uip/special.hpp"

using namespace uip;

TEST_CASE("digamma against finite differences of lgamma") {
  for (double x : {0.05, 0.3, 1.0, 2.5, 5.9, 9.9, 10.1, 17.0, 250.0}) {
    const double h = 1e-5 * std::max(1.0, x);
    const double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2 * h);
    CHECK(digamma(x) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-14));
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-12, 1e-4, 0.025, 0.3, 0.5, 0.8, 0.975, 1 - 1e-9})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("initial posteriors") {
  const auto b = std::get<Beta>(initial_posterior(BinarySummary(10, 5)));
  CHECK(b.alpha == 5.5);
  CHECK(b.beta == 5.5);
  const auto c = std::get<Normal>(initial_posterior(ContinuousSummary(100, 0.0, 1.0)));
  CHECK(c.mean == 0.0);
  CHECK(c.var == doctest::Approx(0.0099));
  const auto k = std::get<Normal>(initial_posterior(CoefficientSummary(1.819, 1.513, 210)));
  CHECK(k.var == doctest::Approx(2.289).epsilon(1e-3));
}

TEST_CASE("closed-form KL values") {
  CHECK(kl_divergence(Normal{0, 1}, Normal{1, 1}) == doctest::Approx(0.5));
  CHECK(kl_divergence(Normal{0.3, 2}, Normal{0.3, 2}) == 0.0);
  CHECK(kl_divergence(Beta{2, 2}, Beta{1, 1}) == doctest::Approx(0.1253).epsilon(1e-3));
  CHECK(kl_divergence(Beta{2, 2}, Beta{1, 1}) == doctest::Approx(oracle::kl_beta_quadrature(2, 2, 1, 1)).epsilon(1e-8));
  CHECK(js_distance(Normal{0, 1}, Normal{1, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(kl_divergence(InitialPosterior{Normal{0, 1}}, InitialPosterior{Beta{1, 1}}), Error);
}

TEST_CASE("KL matches quadrature and is nonnegative on random pairs") {
  gen::Source g(41);
  for (int i = 0; i < 100; ++i) {
    const double m1 = g.uniform(-2, 2), v1 = g.uniform(0.05, 3), m2 = g.uniform(-2, 2), v2 = g.uniform(0.05, 3);
    const double kl = kl_divergence(Normal{m1, v1}, Normal{m2, v2});
    CHECK(std::fabs(kl - oracle::kl_normal_quadrature(m1, v1, m2, v2)) < 1e-6);
    CHECK(kl >= 0.0);
    const double a1 = g.uniform(0.6, 30), b1 = g.uniform(0.6, 30), a2 = g.uniform(0.6, 30), b2 = g.uniform(0.6, 30);
    const double klb = kl_divergence(Beta{a1, b1}, Beta{a2, b2});
    CHECK(std::fabs(klb - oracle::kl_beta_quadrature(a1, b1, a2, b2)) < 1e-6);
    CHECK(klb >= 0.0);
    const InitialPosterior p = Beta{a1, b1}, q = Beta{a2, b2};
    CHECK(js_distance(p, q) == js_distance(q, p));
  }
}

TEST_CASE("js weights") {
  const WeightVector eq = js_weights(Eigen::Vector3d(1, 1, 1));
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(eq[k] == doctest::Approx(1.0 / 3));
  const WeightVector two = js_weights(Eigen::Vector2d(1, 2));
  CHECK(two[0] == doctest::Approx(2.0 / 3));
  const WeightVector guard = js_weights(Eigen::Vector2d(0, 1));
  CHECK(guard[0] == doctest::Approx(1e6 / (1e6 + 1)).epsilon(1e-12));
  CHECK(guard[1] == doctest::Approx(1 / (1e6 + 1)).epsilon(1e-9));
  gen::Source g(42);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd d(4);
    for (int k = 0; k < 4; ++k) d[k] = g.uniform(1e-3, 10);
    const double c = g.uniform(0.01, 100);
    const WeightVector a = js_weights(d), b = js_weights(Eigen::VectorXd(d * c));
    CHECK(a.values().sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 4; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
  }
}

TEST_CASE("distances from a study set use the surrogate for oversized studies") {
  const StudySet s({"cur", ContinuousSummary(50, 0.0, 1.0)},
                   {{"small", ContinuousSummary(40, 0.2, 1.0)}, {"large", ContinuousSummary(200, 0.2, 1.0)}});
  const DistanceReport d = js_distances(s);
  CHECK_FALSE(d.subsampled[0]);
  CHECK(d.subsampled[1]);
  const auto capped = std::get<Normal>(capped_initial_posterior(ContinuousSummary(200, 0.2, 1.0), 50));
  CHECK(capped.var == doctest::Approx(mle_variance(ContinuousSummary(200, 0.2, 1.0)) / 50));
  const double expect = js_distance(initial_posterior(s.current().data), InitialPosterior{capped});
  CHECK(d.d[1] == doctest::Approx(expect));
}

TEST_CASE("subsampled distance") {
  std::vector<double> cur, big;
  for (int i = 0; i < 60; ++i) cur.push_back(std::sin(i * 0.7));
  for (int r = 0; r < 5; ++r) big.insert(big.end(), cur.begin(), cur.end());
  const PatientLevel c{EndpointKind::Continuous, cur}, h{EndpointKind::Continuous, big};
  CHECK_THROWS_AS(js_distance_subsampled(c, c, 10, 1), Error);
  const double d1 = js_distance_subsampled(c, h, 100, 7);
  CHECK(d1 == js_distance_subsampled(c, h, 100, 7));
  // Subsample means scatter around the current mean with finite-population variance (1 - n/N) v,
  // so the expected distance is about (1 - n/N) / 2.
  CHECK(d1 == doctest::Approx(0.5 * (1.0 - 60.0 / 300.0)).epsilon(0.3));
  std::vector<double> shifted = big;
  for (double& v : shifted) v += 0.5;
  CHECK(js_distance_subsampled(c, {EndpointKind::Continuous, shifted}, 100, 7) > 5 * d1);

  std::vector<double> y;
  for (int i = 0; i < 30; ++i) y.push_back(i % 3 == 0 ? 1.0 : 0.0);
  std::vector<double> yb;
  for (int r = 0; r < 10; ++r) yb.insert(yb.end(), y.begin(), y.end());
  const double db = js_distance_subsampled({EndpointKind::Binary, y}, {EndpointKind::Binary, yb}, 100, 3);
  CHECK(db == doctest::Approx(0.5 * (1.0 - 30.0 / 300.0)).epsilon(0.3));
}
