#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "uip/chain.hpp"
#include "uip/core.hpp"
#include "uip/mcmc.hpp"

namespace uip {

struct EssResult {
  double value = 0.0;
  std::string method;
  /// batch-means standard error of the unrounded minimizer (marginal only)
  double mc_error = 0.0;
};

/// sigma^2 M sum_k w_k I_U(theta_k). For a coefficient, pass sigma2 = 1 / I_U of the current estimate.
double conditional_ess_continuous(double m, const Eigen::VectorXd& w, double sigma2_current,
                                  const NormalHistory& hist);

/// alpha + beta of the moment-matched Beta: M (sum w p)(sum w (1-p))(sum w / (p (1-p))) - 1.
/// Throws InvalidPriorMoments when the Beta does not exist.
double conditional_ess_binary(double m, const Eigen::VectorXd& w, const BinaryHistory& hist);

/// Posterior mean of conditional_ess_continuous over the (M, w) draws of a UIP chain.
double posterior_ess(const Chain& chain, double sigma2_current, const NormalHistory& hist);

/// Posterior mean of conditional_ess_binary over the (M, w) draws of a UIP chain.
double posterior_ess_binary(const Chain& chain, const BinaryHistory& hist);

struct MarginalEssOptions {
  long grid_max = 1000;
  long mc_draws = 4000;
  std::uint64_t seed = 1;
  /// variance inflation of the epsilon-information prior
  double inflation = 1e4;
  int batches = 10;

  /// Throws ConfigError.
  void validate() const;
};

/// Marginal ESS of pi(theta | D_1..D_K) with the hyper-parameters integrated over their hyper-prior.
/// Throws GridExhausted when the minimizer sits at grid_max.
EssResult marginal_ess(double sigma2_current, const NormalHistory& hist, const AmountPrior& amount,
                       const WeightSpec& weights, const MarginalEssOptions& opts = {});
EssResult marginal_ess(const BinaryHistory& hist, const AmountPrior& amount, const WeightSpec& weights,
                       const MarginalEssOptions& opts = {});

}  // namespace uip
