#include "uip/mcmc.hpp"

#include "engine.hpp"
#include "uip/error.hpp"

namespace uip {

WeightSpec WeightSpec::dirichlet(Eigen::VectorXd gamma) {
  if (gamma.size() < 1) throw Error(Errc::ConfigError, "Dirichlet hyper-prior needs at least one component");
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    if (!(gamma[k] > 0.0)) throw Error(Errc::ConfigError, "Dirichlet concentrations must be > 0");
  WeightSpec s;
  s.gamma_ = std::move(gamma);
  return s;
}

WeightSpec WeightSpec::fixed(WeightVector w) {
  WeightSpec s;
  s.gamma_ = Eigen::VectorXd::Ones(w.size());
  s.fixed_ = std::move(w);
  return s;
}

Eigen::VectorXd WeightSpec::initial() const {
  if (fixed_) return fixed_->values();
  return gamma_ / gamma_.sum();
}

namespace {

void check_sizes(Eigen::Index hist, const WeightSpec& weights) {
  if (hist != weights.size())
    throw Error(Errc::ConfigError, "weight specification has " + std::to_string(weights.size()) +
                                       " components for " + std::to_string(hist) + " historical studies");
}

AmountPrior checked_amount(const AmountPrior& amount) {
  if (amount.is_fixed() && !(amount.value() > 0.0))
    throw Error(Errc::DegeneratePrior, "fixed M = 0 gives a flat prior; use the noninformative sampler");
  return amount;
}

void require(const StudySet& studies, EndpointKind kind) {
  if (studies.kind() != kind)
    throw Error(Errc::UnsupportedEndpoint, std::string("sampler expects a ") + to_string(kind) + " study set, got " +
                                               to_string(studies.kind()));
}

}  // namespace

NormalHistory slope_history(const StudySet& studies) {
  const auto k = static_cast<Eigen::Index>(studies.size());
  NormalHistory h{Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& data = studies.historical()[static_cast<std::size_t>(i)].data;
    if (const auto* c = std::get_if<CoefficientSummary>(&data)) {
      h.estimate[i] = c->estimate();
      h.sampling_var[i] = c->se() * c->se();
      h.unit_info[i] = unit_info_coefficient(*c);
      h.n[i] = static_cast<double>(c->n());
    } else {
      // least-squares slope of a two-arm study and its plug-in variance
      const auto& s = std::get<TwoArmGroupStats>(data);
      const double n1 = static_cast<double>(s.treatment.n());
      const double n0 = static_cast<double>(s.control.n());
      const double sigma2 = (sum_of_squares(s.treatment) + sum_of_squares(s.control)) / (n0 + n1);
      h.estimate[i] = s.treatment.mean() - s.control.mean();
      h.sampling_var[i] = sigma2 * (1.0 / n0 + 1.0 / n1);
      h.unit_info[i] = unit_info_two_arm_slope(s);
      h.n[i] = n0 + n1;
    }
  }
  return h;
}

Chain sample_uip_continuous(const ContinuousSummary& current, const NormalHistory& hist, const AmountPrior& amount,
                            const WeightSpec& weights, const ChainConfig& cfg, const SamplerOptions& opts) {
  check_sizes(hist.size(), weights);
  detail::NormalMeanBlock lik(current, opts);
  detail::UipNormalPrior prior(hist, checked_amount(amount), weights, cfg);
  return detail::run_sampler(lik, prior, cfg);
}

Chain sample_uip_continuous(const StudySet& studies, const AmountPrior& amount, const WeightSpec& weights,
                            const ChainConfig& cfg) {
  require(studies, EndpointKind::Continuous);
  const auto hist = studies.historical_as<ContinuousSummary>();
  return sample_uip_continuous(std::get<ContinuousSummary>(studies.current().data), make_history(hist), amount,
                               weights, cfg);
}

Chain sample_uip_binary(const BinarySummary& current, const BinaryHistory& hist, const AmountPrior& amount,
                        const WeightSpec& weights, const ChainConfig& cfg) {
  check_sizes(hist.size(), weights);
  const AmountPrior a = checked_amount(amount);
  // the starting point must satisfy the Beta moment condition
  const double m0 = a.is_fixed() ? a.value() : 0.5 * a.value();
  uip_beta(m0, weights.initial(), hist);
  detail::BernoulliBlock lik(current);
  detail::UipBetaPrior prior(hist, a, weights, cfg);
  return detail::run_sampler(lik, prior, cfg);
}

Chain sample_uip_binary(const StudySet& studies, const AmountPrior& amount, const WeightSpec& weights,
                        const ChainConfig& cfg) {
  require(studies, EndpointKind::Binary);
  const auto hist = studies.historical_as<BinarySummary>();
  return sample_uip_binary(std::get<BinarySummary>(studies.current().data), make_history(hist), amount, weights,
                           cfg);
}

Chain sample_uip_regression(const TwoArmGroupStats& current, const NormalHistory& slope_hist,
                            const AmountPrior& amount, const WeightSpec& weights, const ChainConfig& cfg,
                            const SamplerOptions& opts) {
  check_sizes(slope_hist.size(), weights);
  detail::TwoArmBlock lik(current, opts);
  detail::UipNormalPrior prior(slope_hist, checked_amount(amount), weights, cfg);
  return detail::run_sampler(lik, prior, cfg);
}

Chain sample_uip_regression(const StudySet& studies, const AmountPrior& amount, const WeightSpec& weights,
                            const ChainConfig& cfg) {
  require(studies, EndpointKind::TwoArm);
  return sample_uip_regression(std::get<TwoArmGroupStats>(studies.current().data), slope_history(studies), amount,
                               weights, cfg);
}

Chain sample_two_arm(const TwoArmGroupStats& current, const std::optional<Normal>& slope_prior,
                     const ChainConfig& cfg, const SamplerOptions& opts) {
  detail::TwoArmBlock lik(current, opts);
  detail::FixedNormalPrior prior(slope_prior);
  return detail::run_sampler(lik, prior, cfg);
}

Chain sample_normal_mean(const ContinuousSummary& current, const std::optional<Normal>& prior,
                         const ChainConfig& cfg, const SamplerOptions& opts) {
  detail::NormalMeanBlock lik(current, opts);
  detail::FixedNormalPrior block(prior);
  return detail::run_sampler(lik, block, cfg);
}

Chain sample_rate(const BinarySummary& current, const Beta& prior, const ChainConfig& cfg) {
  detail::BernoulliBlock lik(current);
  detail::FixedBetaPrior block(prior);
  return detail::run_sampler(lik, block, cfg);
}

}  // namespace uip
