#include "uip/core.hpp"

#include <algorithm>
#include <cmath>

#include "uip/error.hpp"

namespace uip {

WeightVector::WeightVector(Eigen::VectorXd w) : w_(std::move(w)) {
  if (w_.size() < 1) throw Error(Errc::InvalidSummary, "weight vector must be non-empty");
  for (Eigen::Index k = 0; k < w_.size(); ++k) {
    if (!(w_[k] > 0.0 && w_[k] <= 1.0)) throw Error(Errc::InvalidSummary, "weights must lie in (0, 1]");
  }
  if (std::fabs(w_.sum() - 1.0) > 1e-12) throw Error(Errc::InvalidSummary, "weights must sum to one");
}

WeightVector WeightVector::uniform(Eigen::Index k) {
  return WeightVector(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
}

WeightVector WeightVector::normalized(const Eigen::VectorXd& scores) {
  Eigen::VectorXd w = scores / scores.sum();
  // re-normalize once more so the sum is exact to rounding
  w /= w.sum();
  return WeightVector(std::move(w));
}

AmountPrior AmountPrior::fixed(double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw Error(Errc::ConfigError, "fixed amount M must be finite and >= 0");
  return {Mode::Fixed, m};
}

AmountPrior AmountPrior::uniform(double upper) {
  if (!(upper > 0.0) || !std::isfinite(upper)) throw Error(Errc::ConfigError, "uniform amount bound must be > 0");
  return {Mode::Uniform, upper};
}

double unit_info_continuous(const ContinuousSummary& s) { return 1.0 / mle_variance(s); }

double unit_info_binary(const BinarySummary& b) {
  const double p = corrected_rate(b);
  return 1.0 / (p * (1.0 - p));
}

double unit_info_coefficient(const CoefficientSummary& c) {
  return 1.0 / (static_cast<double>(c.n()) * c.se() * c.se());
}

double unit_info_two_arm_slope(const TwoArmGroupStats& s) {
  const double n = static_cast<double>(s.n());
  const double sigma2 = (sum_of_squares(s.treatment) + sum_of_squares(s.control)) / n;
  return static_cast<double>(s.treatment.n()) / (n * sigma2);
}

NormalHistory make_history(std::span<const ContinuousSummary> hist) {
  const auto k = static_cast<Eigen::Index>(hist.size());
  NormalHistory h{Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& s = hist[static_cast<std::size_t>(i)];
    const double v = mle_variance(s);
    h.estimate[i] = s.mean();
    h.sampling_var[i] = v / static_cast<double>(s.n());
    h.unit_info[i] = 1.0 / v;
    h.n[i] = static_cast<double>(s.n());
  }
  return h;
}

NormalHistory make_history(std::span<const CoefficientSummary> hist) {
  const auto k = static_cast<Eigen::Index>(hist.size());
  NormalHistory h{Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& c = hist[static_cast<std::size_t>(i)];
    h.estimate[i] = c.estimate();
    h.sampling_var[i] = c.se() * c.se();
    h.unit_info[i] = unit_info_coefficient(c);
    h.n[i] = static_cast<double>(c.n());
  }
  return h;
}

BinaryHistory make_history(std::span<const BinarySummary> hist) {
  const auto k = static_cast<Eigen::Index>(hist.size());
  BinaryHistory h{Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& b = hist[static_cast<std::size_t>(i)];
    h.rate[i] = corrected_rate(b);
    h.unit_info[i] = unit_info_binary(b);
    h.successes[i] = static_cast<double>(b.successes());
    h.n[i] = static_cast<double>(b.n());
  }
  return h;
}

Normal uip_normal(double m, const Eigen::VectorXd& w, const NormalHistory& hist) {
  if (!(m > 0.0)) throw Error(Errc::DegeneratePrior, "UIP with M = 0 has infinite variance");
  return {w.dot(hist.estimate), 1.0 / (m * w.dot(hist.unit_info))};
}

Beta beta_from_moments(double mu, double var) {
  if (!(mu > 0.0 && mu < 1.0)) throw Error(Errc::InvalidPriorMoments, "Beta mean must lie in (0, 1)");
  const double spread = mu * (1.0 - mu);
  if (!(var < spread) || !(var > 0.0))
    throw Error(Errc::InvalidPriorMoments, "Beta variance must lie in (0, mu (1 - mu))");
  const double total = spread / var - 1.0;
  return {mu * total, (1.0 - mu) * total};
}

Beta uip_beta(double m, const Eigen::VectorXd& w, const BinaryHistory& hist) {
  if (!(m > 0.0)) throw Error(Errc::DegeneratePrior, "UIP with M = 0 has infinite variance");
  return beta_from_moments(w.dot(hist.rate), 1.0 / (m * w.dot(hist.unit_info)));
}

Eigen::VectorXd dirichlet_gammas(long n_current, std::span<const long> n_hist) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(n_hist.size()));
  for (std::size_t k = 0; k < n_hist.size(); ++k)
    g[static_cast<Eigen::Index>(k)] = std::min(1.0, static_cast<double>(n_hist[k]) / static_cast<double>(n_current));
  return g;
}

}  // namespace uip
