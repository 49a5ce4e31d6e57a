#pragma once

#include <optional>

#include <Eigen/Dense>

#include "uip/chain.hpp"
#include "uip/core.hpp"
#include "uip/data.hpp"

namespace uip {

/// How the UIP weights are treated: sampled under a Dirichlet(gamma) hyper-prior, or held fixed.
class WeightSpec {
 public:
  static WeightSpec dirichlet(Eigen::VectorXd gamma);
  static WeightSpec fixed(WeightVector w);

  bool is_fixed() const noexcept { return fixed_.has_value(); }
  const Eigen::VectorXd& gamma() const noexcept { return gamma_; }
  const WeightVector& weights() const { return *fixed_; }
  Eigen::Index size() const noexcept { return is_fixed() ? fixed_->size() : gamma_.size(); }
  /// Starting point of a chain: the fixed weights or gamma normalized.
  Eigen::VectorXd initial() const;

 private:
  Eigen::VectorXd gamma_;
  std::optional<WeightVector> fixed_;
};

struct SamplerOptions {
  /// InvGamma(zeta, zeta) prior on the current-data variance.
  double invga_zeta = 0.01;
  /// Hold sigma^2 at this value instead of sampling it.
  std::optional<double> known_sigma2;
  /// Normal(0, var) prior on the intercept of the two-arm model.
  double intercept_prior_var = 100.0;
};

/// Lower reflection bound for the amount parameter M.
inline constexpr double kMinAmount = 1e-6;

/// Slope history of a two-arm study set. Coefficient records use 1 / (n se^2) as unit information;
/// two-arm records use the least-squares slope and the observed slope information unit_info_two_arm_slope.
NormalHistory slope_history(const StudySet& studies);

/// UIP-Dirichlet (weights sampled) or UIP-JS (weights fixed) for a normal mean.
/// Chain columns: theta, sigma2, M, w1..wK.
Chain sample_uip_continuous(const ContinuousSummary& current, const NormalHistory& hist, const AmountPrior& amount,
                            const WeightSpec& weights, const ChainConfig& cfg, const SamplerOptions& opts = {});
Chain sample_uip_continuous(const StudySet& studies, const AmountPrior& amount, const WeightSpec& weights,
                            const ChainConfig& cfg);

/// UIP on a response rate with the Beta moment-matched conditional prior.
/// Chain columns: theta, M, w1..wK. Proposals violating the Beta moment condition are rejected.
Chain sample_uip_binary(const BinarySummary& current, const BinaryHistory& hist, const AmountPrior& amount,
                        const WeightSpec& weights, const ChainConfig& cfg);
Chain sample_uip_binary(const StudySet& studies, const AmountPrior& amount, const WeightSpec& weights,
                        const ChainConfig& cfg);

/// Two-arm linear model Y ~ N(b0 + b1 X, sigma^2) with the UIP on b1 and Normal(0, 100) on b0.
/// Chain columns: beta0, beta1, sigma2, M, w1..wK.
Chain sample_uip_regression(const TwoArmGroupStats& current, const NormalHistory& slope_hist,
                            const AmountPrior& amount, const WeightSpec& weights, const ChainConfig& cfg,
                            const SamplerOptions& opts = {});
Chain sample_uip_regression(const StudySet& studies, const AmountPrior& amount, const WeightSpec& weights,
                            const ChainConfig& cfg);

/// Two-arm model with a fixed Normal prior on b1 (nullopt: flat).
Chain sample_two_arm(const TwoArmGroupStats& current, const std::optional<Normal>& slope_prior,
                     const ChainConfig& cfg, const SamplerOptions& opts = {});

/// Normal mean with a fixed Normal prior on theta (nullopt: flat).
Chain sample_normal_mean(const ContinuousSummary& current, const std::optional<Normal>& prior,
                         const ChainConfig& cfg, const SamplerOptions& opts = {});

/// Rate with a fixed Beta prior.
Chain sample_rate(const BinarySummary& current, const Beta& prior, const ChainConfig& cfg);

}  // namespace uip
