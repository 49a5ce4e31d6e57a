#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "uip/core.hpp"
#include "uip/data.hpp"
#include "uip/error.hpp"

using namespace uip;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::ConfigError;
}

NormalHistory history(std::vector<double> est, std::vector<double> info) {
  const auto k = static_cast<Eigen::Index>(est.size());
  NormalHistory h{Eigen::Map<Eigen::VectorXd>(est.data(), k), Eigen::VectorXd::Ones(k),
                  Eigen::Map<Eigen::VectorXd>(info.data(), k), Eigen::VectorXd::Constant(k, 100.0)};
  return h;
}

}  // namespace

TEST_CASE("summaries reject invalid inputs") {
  CHECK(code_of([] { ContinuousSummary(1, 0.0, 1.0); }) == Errc::InvalidSummary);
  CHECK(code_of([] { ContinuousSummary(10, 0.0, 0.0); }) == Errc::InvalidSummary);
  CHECK(code_of([] { ContinuousSummary(10, NAN, 1.0); }) == Errc::InvalidSummary);
  CHECK(code_of([] { BinarySummary(10, 11); }) == Errc::InvalidSummary);
  CHECK(code_of([] { BinarySummary(0, 0); }) == Errc::InvalidSummary);
  CHECK(code_of([] { CoefficientSummary(1.0, -1.0, 10); }) == Errc::InvalidSummary);
  CHECK(code_of([] { se_from_ci(1.0, 1.0, 0.95); }) == Errc::NonPositiveWidth);
  CHECK(code_of([] { se_from_ci(0.0, 1.0, 1.0); }) == Errc::BadLevel);
}

TEST_CASE("study sets need history of a compatible kind") {
  const LabeledSummary cur{"cur", ContinuousSummary(50, 0.0, 1.0)};
  CHECK(code_of([&] { StudySet(cur, {}); }) == Errc::InvalidSummary);
  CHECK(code_of([&] { StudySet(cur, {{"h", BinarySummary(10, 3)}}); }) == Errc::InvalidSummary);
  const TwoArmGroupStats arms{ContinuousSummary(20, 1.0, 1.0), ContinuousSummary(20, 0.0, 1.0)};
  const StudySet mixed({"cur", arms}, {{"h", CoefficientSummary(1.0, 0.3, 40)}, {"g", arms}});
  CHECK(mixed.kind() == EndpointKind::TwoArm);
  CHECK(sample_size(mixed.current().data) == 40);
}

TEST_CASE("se from a published interval") {
  CHECK(se_from_ci(-1.959963984540054, 1.959963984540054, 0.95) == doctest::Approx(1.0).epsilon(1e-12));
  // MEM-MD-12 slope interval
  CHECK(se_from_ci(-2.553, 2.801, 0.95) == doctest::Approx(1.36578).epsilon(1e-4));
  gen::Source g(11);
  for (int i = 0; i < 200; ++i) {
    const double a = g.uniform(-5, 5), w = g.uniform(0.1, 5), c = g.uniform(-100, 100), l = g.uniform(0.5, 0.99);
    CHECK(se_from_ci(a + c, a + w + c, l) == doctest::Approx(se_from_ci(a, a + w, l)).epsilon(1e-9));
  }
}

TEST_CASE("mle variance and corrected rate") {
  CHECK(mle_variance(ContinuousSummary(100, 0.0, 1.0)) == doctest::Approx(0.99));
  CHECK(corrected_rate(BinarySummary(10, 0)) == doctest::Approx(0.5 / 11));
  CHECK(corrected_rate(BinarySummary(10, 10)) == doctest::Approx(10.5 / 11));
  CHECK(corrected_rate(BinarySummary(10, 3)) == 0.3);
  gen::Source g(12);
  for (int i = 0; i < 200; ++i) {
    const auto s = g.continuous(2, 5000);
    CHECK(mle_variance(s) < s.sd() * s.sd());
    const long n = g.integer(1, 50);
    const double p = corrected_rate(BinarySummary(n, g.integer(0, n)));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  CHECK(mle_variance(ContinuousSummary(1000000, 0.0, 2.0)) / 4.0 == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("unit information") {
  CHECK(unit_info_continuous(ContinuousSummary(100, 0.0, 2.0)) == doctest::Approx(0.252525).epsilon(1e-5));
  CHECK(unit_info_continuous(ContinuousSummary(100, 0.0, 0.9)) == doctest::Approx(1.0 / (0.81 * 0.99)).epsilon(1e-12));
  CHECK(unit_info_continuous(ContinuousSummary(10000000, 0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(unit_info_binary(BinarySummary(10, 5)) == 4.0);
  CHECK(unit_info_binary(BinarySummary(10, 2)) == doctest::Approx(6.25));
  CHECK(unit_info_binary(BinarySummary(10, 0)) == doctest::Approx(23.0476).epsilon(1e-4));
  CHECK(unit_info_coefficient(CoefficientSummary(0.0, 1.0, 2)) == doctest::Approx(0.5));
  CHECK(unit_info_coefficient(CoefficientSummary(0.0, 1.366, 261)) == doctest::Approx(0.002053).epsilon(1e-3));
  CHECK(unit_info_coefficient(CoefficientSummary(0.0, 0.5, 100)) == doctest::Approx(0.04));
  // n_t / (n sigma^2) with sigma^2 = pooled SS / n
  const TwoArmGroupStats arms{ContinuousSummary(10, 1.0, 2.0), ContinuousSummary(30, 0.0, 1.0)};
  CHECK(unit_info_two_arm_slope(arms) == doctest::Approx(10.0 / (9 * 4 + 29 * 1)));
}

TEST_CASE("uip normal prior") {
  const Normal a = uip_normal(40, Eigen::Vector2d(0.5, 0.5), history({-0.3, 0.3}, {1, 1}));
  CHECK(a.mean == doctest::Approx(0.0));
  CHECK(a.var == doctest::Approx(0.025));
  const Normal b = uip_normal(1, Eigen::VectorXd::Ones(1), history({5}, {4}));
  CHECK(b.mean == 5.0);
  CHECK(b.var == 0.25);
  const Normal c = uip_normal(100, Eigen::Vector2d(0.8, 0.2), history({0.5, 1.0}, {1, 1}));
  CHECK(c.mean == doctest::Approx(0.6));
  CHECK(c.var == doctest::Approx(0.01));
  CHECK(code_of([] { uip_normal(0.0, Eigen::VectorXd::Ones(1), history({5}, {4})); }) == Errc::DegeneratePrior);
}

TEST_CASE("uip normal properties on random histories") {
  gen::Source g(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto k = static_cast<std::size_t>(g.integer(1, 6));
    const auto studies = g.continuous_set(k);
    const NormalHistory h = make_history(std::span<const ContinuousSummary>(studies));
    const Eigen::VectorXd w = g.simplex(static_cast<Eigen::Index>(k));
    const double m = g.uniform(0.5, 300);
    const Normal p = uip_normal(m, w, h);
    CHECK(p.mean >= h.estimate.minCoeff() - 1e-12);
    CHECK(p.mean <= h.estimate.maxCoeff() + 1e-12);
    CHECK(uip_normal(m * 1.5, w, h).var < p.var);

    // joint permutation
    std::vector<Eigen::Index> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = static_cast<Eigen::Index>(k - 1 - i);
    NormalHistory hp = h;
    Eigen::VectorXd wp = w;
    for (std::size_t i = 0; i < k; ++i) {
      hp.estimate[static_cast<Eigen::Index>(i)] = h.estimate[perm[i]];
      hp.unit_info[static_cast<Eigen::Index>(i)] = h.unit_info[perm[i]];
      wp[static_cast<Eigen::Index>(i)] = w[perm[i]];
    }
    const Normal q = uip_normal(m, wp, hp);
    CHECK(q.mean == doctest::Approx(p.mean).epsilon(1e-12));
    CHECK(q.var == doctest::Approx(p.var).epsilon(1e-12));
  }
  const ContinuousSummary one(50, 1.2, 1.7);
  const NormalHistory h1 = make_history(std::span<const ContinuousSummary>(&one, 1));
  CHECK(uip_normal(30, Eigen::VectorXd::Ones(1), h1).var == doctest::Approx(mle_variance(one) / 30).epsilon(1e-14));
}

TEST_CASE("beta moment matching") {
  const Beta u = beta_from_moments(0.5, 1.0 / 12.0);
  CHECK(std::fabs(u.alpha - 1.0) < 1e-12);
  CHECK(std::fabs(u.beta - 1.0) < 1e-12);
  const BinarySummary half(10, 5);
  const BinaryHistory h = make_history(std::span<const BinarySummary>(&half, 1));
  CHECK(code_of([&] { uip_beta(1.0, Eigen::VectorXd::Ones(1), h); }) == Errc::InvalidPriorMoments);
  const Beta b = uip_beta(10.0, Eigen::VectorXd::Ones(1), h);
  CHECK(b.alpha == doctest::Approx(4.5));
  CHECK(b.beta == doctest::Approx(4.5));

  gen::Source g(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto k = static_cast<std::size_t>(g.integer(1, 5));
    const auto studies = g.binary_set(k);
    const BinaryHistory bh = make_history(std::span<const BinarySummary>(studies));
    const Eigen::VectorXd w = g.simplex(static_cast<Eigen::Index>(k));
    const double mu = w.dot(bh.rate);
    const double var_needed = mu * (1 - mu);
    const double m = g.uniform(1.0, 200.0);
    const double eta2 = 1.0 / (m * w.dot(bh.unit_info));
    if (eta2 >= var_needed) continue;
    const Beta p = uip_beta(m, w, bh);
    CHECK(p.mean() == doctest::Approx(mu).epsilon(1e-12));
    CHECK(p.var() == doctest::Approx(eta2).epsilon(1e-12));
  }
}

TEST_CASE("dirichlet gammas") {
  const std::vector<long> a{80, 100, 120};
  const Eigen::VectorXd ga = dirichlet_gammas(100, a);
  CHECK(ga[0] == doctest::Approx(0.8));
  CHECK(ga[1] == 1.0);
  CHECK(ga[2] == 1.0);
  const std::vector<long> mem{210, 260, 323, 225, 181};
  const Eigen::VectorXd gm = dirichlet_gammas(261, mem);
  const double expected[] = {0.8046, 0.9962, 1.0, 0.8621, 0.6935};
  for (int i = 0; i < 5; ++i) CHECK(gm[i] == doctest::Approx(expected[i]).epsilon(1e-3));
}

TEST_CASE("weight vectors and amount priors") {
  CHECK(code_of([] { WeightVector(Eigen::Vector2d(0.5, 0.6)); }) == Errc::InvalidSummary);
  CHECK(code_of([] { WeightVector(Eigen::Vector2d(0.0, 1.0)); }) == Errc::InvalidSummary);
  CHECK(WeightVector(Eigen::VectorXd::Ones(1)).size() == 1);
  CHECK(WeightVector::uniform(4)[2] == 0.25);
  CHECK(AmountPrior::uniform(40).value() == 40);
  CHECK_THROWS_AS(AmountPrior::uniform(0.0), Error);
}
