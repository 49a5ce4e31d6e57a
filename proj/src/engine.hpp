#pragma once

// Metropolis-within-Gibbs building blocks shared by every sampler.
//
// A sampler is a likelihood block (current data: draws theta and nuisance parameters
// by exact conjugate updates) paired with a prior block (supplies the conditional prior
// of theta and updates its hyper-parameters given theta).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uip/chain.hpp"
#include "uip/core.hpp"
#include "uip/mcmc.hpp"
#include "uip/random.hpp"
#include "uip/special.hpp"

namespace uip::detail {

/// Reflects x into [lo, hi]; symmetric proposals stay symmetric.
inline double reflect(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  return lo + (y <= width ? y : 2.0 * width - y);
}

inline bool accept_log_ratio(double log_ratio, Rng& rng) {
  return log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
}

/// Random-walk scale tuned by Robbins-Monro on the log scale during burn-in, frozen afterwards.
class AdaptiveScale {
 public:
  AdaptiveScale(std::string name, double initial, double target, long window,
                double max_scale = std::numeric_limits<double>::infinity())
      : name_(std::move(name)),
        log_scale_(std::log(initial)),
        log_max_(std::log(max_scale)),
        target_(target),
        window_(window) {}

  double scale() const { return std::exp(log_scale_); }

  void record(bool accepted, bool adapting) {
    if (!adapting) {
      ++sampling_proposed_;
      sampling_accepted_ += accepted;
      return;
    }
    ++burn_proposed_;
    burn_accepted_ += accepted;
    ++batch_proposed_;
    batch_accepted_ += accepted;
    if (batch_proposed_ == window_) {
      ++batches_;
      const double rate = static_cast<double>(batch_accepted_) / static_cast<double>(batch_proposed_);
      log_scale_ += (rate - target_) * std::min(1.0, 3.0 / std::sqrt(static_cast<double>(batches_)));
      log_scale_ = std::min(log_scale_, log_max_);
      batch_proposed_ = batch_accepted_ = 0;
    }
  }

  BlockAcceptance report() const {
    BlockAcceptance r;
    r.block = name_;
    r.burn_in_rate = burn_proposed_ ? static_cast<double>(burn_accepted_) / static_cast<double>(burn_proposed_) : 0.0;
    r.sampling_rate =
        sampling_proposed_ ? static_cast<double>(sampling_accepted_) / static_cast<double>(sampling_proposed_) : 0.0;
    r.final_scale = scale();
    return r;
  }

 private:
  std::string name_;
  double log_scale_;
  double log_max_;
  double target_;
  long window_;
  long batch_proposed_ = 0, batch_accepted_ = 0, batches_ = 0;
  long burn_proposed_ = 0, burn_accepted_ = 0;
  long sampling_proposed_ = 0, sampling_accepted_ = 0;
};

// ---------------------------------------------------------------------------
// Likelihood blocks

/// Normal sample with unknown mean theta and variance sigma^2 ~ InvGamma(zeta, zeta).
class NormalMeanBlock {
 public:
  NormalMeanBlock(const ContinuousSummary& s, const SamplerOptions& opts)
      : n_(static_cast<double>(s.n())),
        ybar_(s.mean()),
        ss_(sum_of_squares(s)),
        zeta_(opts.invga_zeta),
        known_(opts.known_sigma2),
        theta_(s.mean()),
        sigma2_(known_ ? *known_ : mle_variance(s)) {}

  void draw_theta(const std::optional<Normal>& prior, Rng& rng) {
    double prec = n_ / sigma2_;
    double num = prec * ybar_;
    if (prior) {
      prec += 1.0 / prior->var;
      num += prior->mean / prior->var;
    }
    theta_ = num / prec + rng.normal() / std::sqrt(prec);
  }

  void draw_nuisance(Rng& rng) {
    if (known_) return;
    const double d = ybar_ - theta_;
    sigma2_ = rng.inv_gamma(zeta_ + 0.5 * n_, zeta_ + 0.5 * (ss_ + n_ * d * d));
  }

  double theta() const { return theta_; }
  void names(std::vector<std::string>& out) const { out.insert(out.end(), {"theta", "sigma2"}); }
  void values(std::vector<double>& out) const { out.insert(out.end(), {theta_, sigma2_}); }

 private:
  double n_, ybar_, ss_, zeta_;
  std::optional<double> known_;
  double theta_, sigma2_;
};

/// Two-arm linear model from group statistics; theta is the slope b1.
/// (b0, b1) are drawn jointly from their bivariate normal full conditional.
class TwoArmBlock {
 public:
  TwoArmBlock(const TwoArmGroupStats& s, const SamplerOptions& opts)
      : n1_(static_cast<double>(s.treatment.n())),
        n0_(static_cast<double>(s.control.n())),
        y1_(s.treatment.mean()),
        y0_(s.control.mean()),
        ss_(sum_of_squares(s.treatment) + sum_of_squares(s.control)),
        zeta_(opts.invga_zeta),
        intercept_var_(opts.intercept_prior_var),
        known_(opts.known_sigma2),
        beta0_(s.control.mean()),
        beta1_(s.treatment.mean() - s.control.mean()),
        sigma2_(known_ ? *known_ : ss_ / (n0_ + n1_)) {}

  void draw_theta(const std::optional<Normal>& prior, Rng& rng) {
    const double inv = 1.0 / sigma2_;
    Eigen::Matrix2d precision;
    precision << (n0_ + n1_) * inv + 1.0 / intercept_var_, n1_ * inv, n1_ * inv, n1_ * inv;
    Eigen::Vector2d rhs((n0_ * y0_ + n1_ * y1_) * inv, n1_ * y1_ * inv);
    if (prior) {
      precision(1, 1) += 1.0 / prior->var;
      rhs[1] += prior->mean / prior->var;
    }
    const Eigen::LLT<Eigen::Matrix2d> llt(precision);
    const Eigen::Vector2d mean = llt.solve(rhs);
    const Eigen::Vector2d z(rng.normal(), rng.normal());
    const Eigen::Vector2d draw = mean + llt.matrixU().solve(z);
    beta0_ = draw[0];
    beta1_ = draw[1];
  }

  void draw_nuisance(Rng& rng) {
    if (known_) return;
    const double d0 = y0_ - beta0_;
    const double d1 = y1_ - beta0_ - beta1_;
    const double sse = ss_ + n0_ * d0 * d0 + n1_ * d1 * d1;
    sigma2_ = rng.inv_gamma(zeta_ + 0.5 * (n0_ + n1_), zeta_ + 0.5 * sse);
  }

  double theta() const { return beta1_; }
  void names(std::vector<std::string>& out) const { out.insert(out.end(), {"beta0", "beta1", "sigma2"}); }
  void values(std::vector<double>& out) const { out.insert(out.end(), {beta0_, beta1_, sigma2_}); }

 private:
  double n1_, n0_, y1_, y0_, ss_, zeta_, intercept_var_;
  std::optional<double> known_;
  double beta0_, beta1_, sigma2_;
};

/// Bernoulli sample; theta | prior Beta(a, b) ~ Beta(a + y, b + n - y).
class BernoulliBlock {
 public:
  explicit BernoulliBlock(const BinarySummary& s)
      : n_(static_cast<double>(s.n())), y_(static_cast<double>(s.successes())), theta_(corrected_rate(s)) {}

  void draw_theta(const Beta& prior, Rng& rng) {
    // clamp away from {0, 1} so log-densities of the prior blocks stay finite
    theta_ = std::clamp(rng.beta(prior.alpha + y_, prior.beta + n_ - y_), 1e-12, 1.0 - 1e-12);
  }
  void draw_nuisance(Rng&) {}

  double theta() const { return theta_; }
  void names(std::vector<std::string>& out) const { out.emplace_back("theta"); }
  void values(std::vector<double>& out) const { out.push_back(theta_); }

 private:
  double n_, y_, theta_;
};

// ---------------------------------------------------------------------------
// Prior blocks

class FixedNormalPrior {
 public:
  explicit FixedNormalPrior(std::optional<Normal> prior) : prior_(prior) {}
  std::optional<Normal> conditional() const { return prior_; }
  void update(double, Rng&, bool) {}
  void names(std::vector<std::string>&) const {}
  void values(std::vector<double>&) const {}
  void report(std::vector<BlockAcceptance>&) const {}

 private:
  std::optional<Normal> prior_;
};

class FixedBetaPrior {
 public:
  explicit FixedBetaPrior(Beta prior) : prior_(prior) {}
  Beta conditional() const { return prior_; }
  void update(double, Rng&, bool) {}
  void names(std::vector<std::string>&) const {}
  void values(std::vector<double>&) const {}
  void report(std::vector<BlockAcceptance>&) const {}

 private:
  Beta prior_;
};

/// Shared (M, w) state of the UIP blocks. Weights live on the additive log-ratio
/// (softmax with the last coordinate pinned at 0) scale, z in R^{K-1}.
class UipHyperState {
 public:
  UipHyperState(const AmountPrior& amount, const WeightSpec& weights, const ChainConfig& cfg)
      : amount_(amount),
        weights_(weights),
        m_(amount.is_fixed() ? amount.value() : 0.5 * amount.value()),
        w_(weights.initial()),
        m_scale_("M", amount.is_fixed() ? 1.0 : 0.25 * amount.value(), cfg.target_accept, cfg.adapt_window,
                 amount.value()),
        w_scale_("w", 0.5, cfg.target_accept_multi, cfg.adapt_window) {
    z_ = (w_.head(w_.size() - 1).array() / w_[w_.size() - 1]).log().matrix();
  }

  double m() const { return m_; }
  const Eigen::VectorXd& w() const { return w_; }
  Eigen::Index k() const { return w_.size(); }

  /// One M update and one w update against log_density(M, w).
  template <class LogDensity>
  void update(LogDensity&& log_density, Rng& rng, bool adapting) {
    if (!amount_.is_fixed()) {
      const double proposal = reflect(m_ + m_scale_.scale() * rng.normal(), kMinAmount, amount_.value());
      const double log_ratio = log_density(proposal, w_) - log_density(m_, w_);
      const bool ok = accept_log_ratio(log_ratio, rng);
      if (ok) m_ = proposal;
      m_scale_.record(ok, adapting);
    }
    if (!weights_.is_fixed() && k() > 1) {
      Eigen::VectorXd z_new(z_.size());
      for (Eigen::Index j = 0; j < z_.size(); ++j) z_new[j] = z_[j] + w_scale_.scale() * rng.normal();
      const Eigen::VectorXd w_new = softmax(z_new);
      // Dirichlet(gamma) density on z includes the Jacobian prod_k w_k.
      const auto log_prior = [this](const Eigen::VectorXd& w) {
        return (weights_.gamma().array() * w.array().log()).sum();
      };
      const double log_ratio = log_density(m_, w_new) + log_prior(w_new) - log_density(m_, w_) - log_prior(w_);
      const bool ok = std::isfinite(log_ratio) && accept_log_ratio(log_ratio, rng);
      if (ok) {
        z_ = z_new;
        w_ = w_new;
      }
      w_scale_.record(ok, adapting);
    }
  }

  void names(std::vector<std::string>& out) const {
    out.emplace_back("M");
    for (Eigen::Index j = 0; j < k(); ++j) out.push_back("w" + std::to_string(j + 1));
  }
  void values(std::vector<double>& out) const {
    out.push_back(m_);
    for (Eigen::Index j = 0; j < k(); ++j) out.push_back(w_[j]);
  }
  void report(std::vector<BlockAcceptance>& out) const {
    if (!amount_.is_fixed()) out.push_back(m_scale_.report());
    if (!weights_.is_fixed() && k() > 1) out.push_back(w_scale_.report());
  }

  static Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    Eigen::VectorXd full(z.size() + 1);
    full.head(z.size()) = z;
    full[z.size()] = 0.0;
    const double top = full.maxCoeff();
    full = (full.array() - top).exp().matrix();
    return full / full.sum();
  }

 private:
  AmountPrior amount_;
  WeightSpec weights_;
  double m_;
  Eigen::VectorXd w_;
  Eigen::VectorXd z_;
  AdaptiveScale m_scale_;
  AdaptiveScale w_scale_;
};

class UipNormalPrior {
 public:
  UipNormalPrior(NormalHistory hist, const AmountPrior& amount, const WeightSpec& weights, const ChainConfig& cfg)
      : hist_(std::move(hist)), state_(amount, weights, cfg) {}

  std::optional<Normal> conditional() const { return uip_normal(state_.m(), state_.w(), hist_); }

  void update(double theta, Rng& rng, bool adapting) {
    const auto log_density = [&](double m, const Eigen::VectorXd& w) {
      const double info = m * w.dot(hist_.unit_info);
      const double d = theta - w.dot(hist_.estimate);
      return 0.5 * std::log(info) - 0.5 * info * d * d;
    };
    state_.update(log_density, rng, adapting);
  }

  void names(std::vector<std::string>& out) const { state_.names(out); }
  void values(std::vector<double>& out) const { state_.values(out); }
  void report(std::vector<BlockAcceptance>& out) const { state_.report(out); }

 private:
  NormalHistory hist_;
  UipHyperState state_;
};

class UipBetaPrior {
 public:
  UipBetaPrior(BinaryHistory hist, const AmountPrior& amount, const WeightSpec& weights, const ChainConfig& cfg)
      : hist_(std::move(hist)), state_(amount, weights, cfg) {}

  Beta conditional() const { return uip_beta(state_.m(), state_.w(), hist_); }

  void update(double theta, Rng& rng, bool adapting) {
    const auto log_density = [&](double m, const Eigen::VectorXd& w) {
      const double mu = w.dot(hist_.rate);
      const double var = 1.0 / (m * w.dot(hist_.unit_info));
      const double spread = mu * (1.0 - mu);
      if (!(var < spread)) return -std::numeric_limits<double>::infinity();
      const double total = spread / var - 1.0;
      return log_beta_pdf(theta, mu * total, (1.0 - mu) * total);
    };
    state_.update(log_density, rng, adapting);
  }

  void names(std::vector<std::string>& out) const { state_.names(out); }
  void values(std::vector<double>& out) const { state_.values(out); }
  void report(std::vector<BlockAcceptance>& out) const { state_.report(out); }

 private:
  BinaryHistory hist_;
  UipHyperState state_;
};

// ---------------------------------------------------------------------------

template <class Likelihood, class Prior>
Chain run_sampler(Likelihood& lik, Prior& prior, const ChainConfig& cfg) {
  cfg.validate();
  std::vector<std::string> names;
  lik.names(names);
  prior.names(names);
  Chain chain(names, cfg);
  chain.reserve(static_cast<std::size_t>(cfg.iterations - cfg.burn_in));
  Rng rng(cfg.seed);
  std::vector<double> row;
  row.reserve(names.size());
  for (long it = 0; it < cfg.iterations; ++it) {
    const bool adapting = it < cfg.burn_in;
    lik.draw_theta(prior.conditional(), rng);
    lik.draw_nuisance(rng);
    prior.update(lik.theta(), rng, adapting);
    if (!adapting) {
      row.clear();
      lik.values(row);
      prior.values(row);
      chain.push(row);
    }
  }
  prior.report(chain.acceptance());
  return chain;
}

}  // namespace uip::detail
