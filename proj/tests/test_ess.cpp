#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "uip/core.hpp"
#include "uip/error.hpp"
#include "uip/ess.hpp"

using namespace uip;

namespace {

NormalHistory equal_var_history(std::initializer_list<double> var) {
  NormalHistory h;
  const auto k = static_cast<Eigen::Index>(var.size());
  h.sampling_var = Eigen::Map<const Eigen::VectorXd>(var.begin(), k);
  h.unit_info = h.sampling_var.cwiseInverse();
  h.estimate = Eigen::VectorXd::LinSpaced(k, 0.0, 1.0);
  h.n = Eigen::VectorXd::Constant(k, 1.0);
  return h;
}

BinaryHistory rates(std::initializer_list<double> p) {
  BinaryHistory h;
  const auto k = static_cast<Eigen::Index>(p.size());
  h.rate = Eigen::Map<const Eigen::VectorXd>(p.begin(), k);
  h.unit_info = (h.rate.array() * (1.0 - h.rate.array())).inverse().matrix();
  h.n = Eigen::VectorXd::Constant(k, 100.0);
  h.successes = h.rate * 100.0;
  return h;
}

}  // namespace

TEST_CASE("conditional ESS, continuous") {
  CHECK(conditional_ess_continuous(87.0, Eigen::Vector2d(0.3, 0.7), 2.0, equal_var_history({2.0, 2.0})) ==
        doctest::Approx(87.0));
  CHECK(conditional_ess_continuous(0.0, Eigen::Vector2d(0.3, 0.7), 2.0, equal_var_history({2.0, 2.0})) == 0.0);
  CHECK(conditional_ess_continuous(100.0, Eigen::Vector2d(0.5, 0.5), 1.0, equal_var_history({1.0, 4.0})) ==
        doctest::Approx(62.5));
}

TEST_CASE("conditional ESS, binary") {
  CHECK(conditional_ess_binary(10.0, Eigen::VectorXd::Ones(1), rates({0.5})) == doctest::Approx(9.0));
  CHECK(conditional_ess_binary(60.0, Eigen::Vector3d(0.2, 0.3, 0.5), rates({0.3, 0.3, 0.3})) ==
        doctest::Approx(59.0));
  CHECK_THROWS_AS(conditional_ess_binary(0.5, Eigen::VectorXd::Ones(1), rates({0.5})), Error);
}

TEST_CASE("ESS properties on random inputs") {
  gen::Source src(71);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto k = static_cast<std::size_t>(src.integer(1, 5));
    const Eigen::VectorXd w = src.simplex(static_cast<Eigen::Index>(k));
    const double m = src.uniform(2.0, 300.0);

    const auto bs = src.binary_set(k);
    const BinaryHistory bh = make_history(std::span<const BinarySummary>(bs));
    const Beta beta = uip_beta(m, WeightVector(w), bh);
    REQUIRE(conditional_ess_binary(m, w, bh) == doctest::Approx(beta.alpha + beta.beta).epsilon(1e-9));

    const auto cs = src.continuous_set(k);
    const NormalHistory ch = make_history(std::span<const ContinuousSummary>(cs));
    const double s2 = src.uniform(0.2, 3.0);
    const double e = conditional_ess_continuous(m, w, s2, ch);
    REQUIRE(conditional_ess_continuous(2.0 * m, w, s2, ch) == doctest::Approx(2.0 * e));
    NormalHistory scaled = ch;
    const double c = src.uniform(0.1, 10.0);
    scaled.unit_info /= c;
    REQUIRE(conditional_ess_continuous(m, w, c * s2, scaled) == doctest::Approx(e));
  }
}

TEST_CASE("marginal ESS collapses to the conditional ESS at a point-mass hyper-prior") {
  const std::vector<ContinuousSummary> hs{ContinuousSummary(80, 0.1, 1.0), ContinuousSummary(100, 0.3, 1.0),
                                          ContinuousSummary(120, 0.2, 1.0)};
  const NormalHistory h = make_history(std::span<const ContinuousSummary>(hs));
  const WeightSpec w = WeightSpec::fixed(WeightVector(Eigen::Vector3d(0.2, 0.3, 0.5)));
  const double s2 = mle_variance(hs[0]);
  NormalHistory eq = h;
  eq.unit_info.setConstant(1.0 / s2);
  for (double m : {20.0, 75.0, 140.0}) {
    const EssResult r = marginal_ess(s2, eq, AmountPrior::fixed(m), w);
    CHECK(std::fabs(r.value - m) <= 1.0);
  }
  const EssResult b = marginal_ess(make_history(std::span<const BinarySummary>(
                                       std::vector<BinarySummary>{BinarySummary(100, 40), BinarySummary(100, 40)})),
                                   AmountPrior::fixed(50.0), WeightSpec::fixed(WeightVector::uniform(2)));
  CHECK(std::fabs(b.value - 49.0) <= 1.0);
}

TEST_CASE("marginal ESS behaviour") {
  const std::vector<ContinuousSummary> hs{ContinuousSummary(80, 0.1, 1.0), ContinuousSummary(120, 0.4, 1.0)};
  const NormalHistory h = make_history(std::span<const ContinuousSummary>(hs));
  const WeightSpec dir = WeightSpec::dirichlet(Eigen::Vector2d(0.8, 1.2));
  MarginalEssOptions o;
  o.seed = 9;
  const EssResult a = marginal_ess(1.0, h, AmountPrior::fixed(100.0), dir, o);
  const EssResult b = marginal_ess(1.0, h, AmountPrior::fixed(100.0), dir, o);
  CHECK(a.value == b.value);
  CHECK(a.value > 0.0);
  CHECK(a.value <= 100.0 * (0.4 + 0.6) + 1.0);
  CHECK(a.mc_error >= 0.0);

  o.grid_max = 50;
  try {
    marginal_ess(1.0, h, AmountPrior::fixed(300.0), WeightSpec::fixed(WeightVector::uniform(2)), o);
    FAIL("expected GridExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridExhausted);
  }

  MarginalEssOptions bad;
  bad.mc_draws = 10;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.grid_max = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
