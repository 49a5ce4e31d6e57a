#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "uip/data.hpp"

namespace uip {

struct Normal {
  double mean;
  double var;
};

struct Beta {
  double alpha;
  double beta;

  double mean() const noexcept { return alpha / (alpha + beta); }
  double var() const noexcept {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
};

/// A prior for the parameter of interest, conditional on the borrowing hyper-parameters.
using ConditionalPrior = std::variant<Normal, Beta>;

/// Point on the open simplex (K = 1 gives the single vertex w = (1)).
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd w);
  static WeightVector uniform(Eigen::Index k);
  /// Normalizes positive scores onto the simplex.
  static WeightVector normalized(const Eigen::VectorXd& scores);

  const Eigen::VectorXd& values() const noexcept { return w_; }
  Eigen::Index size() const noexcept { return w_.size(); }
  double operator[](Eigen::Index k) const { return w_[k]; }

 private:
  Eigen::VectorXd w_;
};

/// Hyper-prior on the amount parameter M: either a fixed value or Uniform(0, upper).
class AmountPrior {
 public:
  enum class Mode { Fixed, Uniform };

  static AmountPrior fixed(double m);
  static AmountPrior uniform(double upper);

  Mode mode() const noexcept { return mode_; }
  bool is_fixed() const noexcept { return mode_ == Mode::Fixed; }
  /// Fixed M, or the Uniform upper bound U.
  double value() const noexcept { return value_; }

 private:
  AmountPrior(Mode mode, double value) : mode_(mode), value_(value) {}
  Mode mode_;
  double value_;
};

/// Columnar view of K historical normal-scale estimates.
///   estimate      theta_hat_k (sample mean or coefficient estimate)
///   sampling_var  variance of theta_hat_k (sigma_k^2 / n_k, or se_k^2)
///   unit_info     I_U(theta_hat_k), information per observation
///   n             study sizes
struct NormalHistory {
  Eigen::VectorXd estimate;
  Eigen::VectorXd sampling_var;
  Eigen::VectorXd unit_info;
  Eigen::VectorXd n;

  Eigen::Index size() const noexcept { return estimate.size(); }
};

struct BinaryHistory {
  Eigen::VectorXd rate;        // corrected rates
  Eigen::VectorXd unit_info;   // 1 / (p (1 - p))
  Eigen::VectorXd successes;
  Eigen::VectorXd n;

  Eigen::Index size() const noexcept { return rate.size(); }
};

double unit_info_continuous(const ContinuousSummary& s);
double unit_info_binary(const BinarySummary& b);
/// 1 / (n se^2): what a published estimate and CI support.
double unit_info_coefficient(const CoefficientSummary& c);
/// Observed information of the treatment slope per observation, n_treatment / (n sigma_hat^2),
/// with sigma_hat^2 the MLE residual variance of the two-arm model.
double unit_info_two_arm_slope(const TwoArmGroupStats& s);

NormalHistory make_history(std::span<const ContinuousSummary> hist);
NormalHistory make_history(std::span<const CoefficientSummary> hist);
BinaryHistory make_history(std::span<const BinarySummary> hist);

/// UIP normal conditional prior: mean sum w_k theta_k, variance 1 / (M sum w_k I_k).
Normal uip_normal(double m, const Eigen::VectorXd& w, const NormalHistory& hist);
inline Normal uip_normal(double m, const WeightVector& w, const NormalHistory& hist) {
  return uip_normal(m, w.values(), hist);
}

/// Beta(alpha, beta) with the given mean and variance; throws InvalidPriorMoments when var >= mu (1 - mu).
Beta beta_from_moments(double mu, double var);

/// UIP on a rate: the normal-scale moments of uip_normal matched onto a Beta.
Beta uip_beta(double m, const Eigen::VectorXd& w, const BinaryHistory& hist);
inline Beta uip_beta(double m, const WeightVector& w, const BinaryHistory& hist) {
  return uip_beta(m, w.values(), hist);
}

/// gamma_k = min(1, n_k / n).
Eigen::VectorXd dirichlet_gammas(long n_current, std::span<const long> n_hist);

}  // namespace uip
