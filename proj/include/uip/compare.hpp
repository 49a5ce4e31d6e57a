#pragma once

#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "uip/chain.hpp"
#include "uip/core.hpp"
#include "uip/data.hpp"

namespace uip {

class Rng;

/// Priors a UIP analysis can be compared against, plus the two UIP variants.
enum class Method { Jeffreys, FullBorrow, Mpp, Lcp, Map, Rmap, UipDirichlet, UipJs };

const char* to_string(Method m) noexcept;
/// Throws ConfigError on an unknown name.
Method parse_method(std::string_view name);
bool is_uip(Method m) noexcept;

struct CompareHyper {
  /// alpha_k ~ Beta(mpp_a, mpp_b)
  double mpp_a = 1.0;
  double mpp_b = 1.0;
  /// log tau_k ~ Uniform(lower, upper)
  double lcp_log_tau_lower = -30.0;
  double lcp_log_tau_upper = 30.0;
  /// tau ~ HalfNormal(scale)
  double map_tau_scale = 1.0;
  double rmap_robust_weight = 0.1;
  /// variance of the vague rMAP component
  double rmap_vague_var = 1e4;
  double invga_zeta = 0.01;

  /// Throws ConfigError.
  void validate() const;
};

/// Power-prior conditional: precision sum_k alpha_k / v_k with v_k the sampling variance of study k.
/// Throws AllZeroPower when every alpha_k is 0.
Normal mpp_conditional(const Eigen::VectorXd& alpha, const NormalHistory& hist);

/// Commensurate-prior conditional: study k enters with precision 1 / (v_k + 1 / tau_k).
Normal lcp_conditional(const Eigen::VectorXd& tau, const NormalHistory& hist);

/// MAP conditional given the between-trial dispersion tau:
/// weights 1 / (v_k + tau), variance 1 / sum_k 1/(v_k + tau) + tau^2.
Normal map_conditional(double tau, const NormalHistory& hist);

/// Precision-weighted mean of the historical estimates.
double pooled_mean(const NormalHistory& hist);

/// One draw of the rMAP mixture component: the vague Normal(pooled mean, vague_var) with probability
/// robust_weight, otherwise map_conditional(tau).
Normal rmap_mixture_draw(double tau, const NormalHistory& hist, double robust_weight, double vague_var, Rng& rng);

/// Binary power-prior conditional under a flat initial prior: Beta(1 + sum a_k y_k, 1 + sum a_k (n_k - y_k)).
Beta mpp_binary_conditional(const Eigen::VectorXd& alpha, const BinaryHistory& hist);

/// Pools current and historical normal samples into one sufficient-statistics summary.
ContinuousSummary pool(const ContinuousSummary& current, std::span<const ContinuousSummary> hist);
BinarySummary pool(const BinarySummary& current, std::span<const BinarySummary> hist);
TwoArmGroupStats pool(const TwoArmGroupStats& current, std::span<const TwoArmGroupStats> hist);

/// Comparison-prior samplers. Chain columns: the likelihood parameters (theta, sigma2 or
/// beta0, beta1, sigma2), then alpha1..K (mpp), tau1..K (lcp), tau (map), or tau, vague (rmap).
///
/// With a NormalHistory only, full_borrow uses the fixed pooled prior Normal(pooled mean, 1 / sum 1/v_k).
Chain sample_compare(const ContinuousSummary& current, const NormalHistory& hist, Method method,
                     const CompareHyper& hyper, const ChainConfig& cfg);
Chain sample_compare(const TwoArmGroupStats& current, const NormalHistory& slope_hist, Method method,
                     const CompareHyper& hyper, const ChainConfig& cfg, double intercept_prior_var = 100.0);
/// Binary: jeffreys (Beta(1/2, 1/2)), full_borrow and mpp only; other methods throw UnsupportedEndpoint.
Chain sample_compare(const BinarySummary& current, std::span<const BinarySummary> hist, Method method,
                     const CompareHyper& hyper, const ChainConfig& cfg);
/// Dispatches on the endpoint kind; full_borrow pools the raw summaries when they are available.
Chain sample_compare(const StudySet& studies, Method method, const CompareHyper& hyper, const ChainConfig& cfg);

}  // namespace uip
