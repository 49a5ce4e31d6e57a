#include "uip/compare.hpp"

#include <array>
#include <cmath>
#include <string>

#include "engine.hpp"
#include "uip/error.hpp"
#include "uip/random.hpp"

namespace uip {

namespace {

constexpr std::array<std::pair<Method, const char*>, 8> kMethodNames{{
    {Method::Jeffreys, "jeffreys"},
    {Method::FullBorrow, "full_borrow"},
    {Method::Mpp, "mpp"},
    {Method::Lcp, "lcp"},
    {Method::Map, "map"},
    {Method::Rmap, "rmap"},
    {Method::UipDirichlet, "uip_dirichlet"},
    {Method::UipJs, "uip_js"},
}};

}  // namespace

const char* to_string(Method m) noexcept {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames)
    if (name == n) return method;
  throw Error(Errc::ConfigError, "unknown method '" + std::string(name) + "'");
}

bool is_uip(Method m) noexcept { return m == Method::UipDirichlet || m == Method::UipJs; }

void CompareHyper::validate() const {
  if (!(mpp_a > 0.0 && mpp_b > 0.0)) throw Error(Errc::ConfigError, "mpp Beta shapes must be > 0");
  if (!(lcp_log_tau_lower < lcp_log_tau_upper)) throw Error(Errc::ConfigError, "lcp log-tau range is empty");
  if (!(map_tau_scale > 0.0)) throw Error(Errc::ConfigError, "map tau scale must be > 0");
  if (!(rmap_robust_weight >= 0.0 && rmap_robust_weight <= 1.0))
    throw Error(Errc::ConfigError, "rmap robust weight must lie in [0, 1]");
  if (!(rmap_vague_var > 0.0)) throw Error(Errc::ConfigError, "rmap vague variance must be > 0");
  if (!(invga_zeta > 0.0)) throw Error(Errc::ConfigError, "inverse-gamma zeta must be > 0");
}

namespace {

Normal precision_weighted(const Eigen::VectorXd& precision, const Eigen::VectorXd& estimate) {
  const double total = precision.sum();
  return {precision.dot(estimate) / total, 1.0 / total};
}

}  // namespace

Normal mpp_conditional(const Eigen::VectorXd& alpha, const NormalHistory& hist) {
  if (!(alpha.array() > 0.0).any()) throw Error(Errc::AllZeroPower, "every power parameter is zero");
  return precision_weighted(alpha.cwiseQuotient(hist.sampling_var), hist.estimate);
}

Normal lcp_conditional(const Eigen::VectorXd& tau, const NormalHistory& hist) {
  const Eigen::VectorXd precision = (hist.sampling_var.array() + tau.array().inverse()).inverse().matrix();
  return precision_weighted(precision, hist.estimate);
}

Normal map_conditional(double tau, const NormalHistory& hist) {
  const Eigen::VectorXd precision = (hist.sampling_var.array() + tau).inverse().matrix();
  Normal out = precision_weighted(precision, hist.estimate);
  out.var += tau * tau;
  return out;
}

double pooled_mean(const NormalHistory& hist) {
  return precision_weighted(hist.sampling_var.cwiseInverse(), hist.estimate).mean;
}

Normal rmap_mixture_draw(double tau, const NormalHistory& hist, double robust_weight, double vague_var, Rng& rng) {
  if (rng.uniform() < robust_weight) return {pooled_mean(hist), vague_var};
  return map_conditional(tau, hist);
}

Beta mpp_binary_conditional(const Eigen::VectorXd& alpha, const BinaryHistory& hist) {
  return {1.0 + alpha.dot(hist.successes), 1.0 + alpha.dot(hist.n - hist.successes)};
}

ContinuousSummary pool(const ContinuousSummary& current, std::span<const ContinuousSummary> hist) {
  double n = static_cast<double>(current.n());
  double sum = n * current.mean();
  for (const auto& h : hist) {
    n += static_cast<double>(h.n());
    sum += static_cast<double>(h.n()) * h.mean();
  }
  const double mean = sum / n;
  const auto within = [mean](const ContinuousSummary& s) {
    const double d = s.mean() - mean;
    return sum_of_squares(s) + static_cast<double>(s.n()) * d * d;
  };
  double ss = within(current);
  for (const auto& h : hist) ss += within(h);
  return {static_cast<long>(n), mean, std::sqrt(ss / (n - 1.0))};
}

BinarySummary pool(const BinarySummary& current, std::span<const BinarySummary> hist) {
  long n = current.n();
  long y = current.successes();
  for (const auto& h : hist) {
    n += h.n();
    y += h.successes();
  }
  return {n, y};
}

TwoArmGroupStats pool(const TwoArmGroupStats& current, std::span<const TwoArmGroupStats> hist) {
  std::vector<ContinuousSummary> treat, control;
  for (const auto& h : hist) {
    treat.push_back(h.treatment);
    control.push_back(h.control);
  }
  return {pool(current.treatment, treat), pool(current.control, control)};
}

namespace detail {
namespace {

/// Random-walk update of one bounded coordinate with reflection.
template <class LogTarget>
void bounded_step(double& x, double lo, double hi, AdaptiveScale& scale, LogTarget&& log_target, Rng& rng,
                  bool adapting) {
  const double proposal = reflect(x + scale.scale() * rng.normal(), lo, hi);
  const double log_ratio = log_target(proposal) - log_target(x);
  const bool ok = std::isfinite(log_ratio) && accept_log_ratio(log_ratio, rng);
  if (ok) x = proposal;
  scale.record(ok, adapting);
}

std::vector<AdaptiveScale> scales(const char* prefix, Eigen::Index k, double initial, double width,
                                  const ChainConfig& cfg) {
  std::vector<AdaptiveScale> out;
  for (Eigen::Index j = 0; j < k; ++j)
    out.emplace_back(prefix + std::to_string(j + 1), initial, cfg.target_accept, cfg.adapt_window, width);
  return out;
}

void indexed_names(const char* prefix, Eigen::Index k, std::vector<std::string>& out) {
  for (Eigen::Index j = 0; j < k; ++j) out.push_back(prefix + std::to_string(j + 1));
}

class MppPrior {
 public:
  MppPrior(NormalHistory hist, const CompareHyper& h, const ChainConfig& cfg)
      : hist_(std::move(hist)),
        a_(h.mpp_a),
        b_(h.mpp_b),
        alpha_(Eigen::VectorXd::Constant(hist_.size(), 0.5)),
        scales_(scales("alpha", hist_.size(), 0.3, 1.0, cfg)) {}

  std::optional<Normal> conditional() const {
    if (!(alpha_.array() > 0.0).any()) return std::nullopt;
    return mpp_conditional(alpha_, hist_);
  }

  void update(double theta, Rng& rng, bool adapting) {
    for (Eigen::Index k = 0; k < alpha_.size(); ++k) {
      const auto target = [&](double a) {
        Eigen::VectorXd alpha = alpha_;
        alpha[k] = a;
        if (!(alpha.array() > 0.0).any()) return -std::numeric_limits<double>::infinity();
        const Normal p = mpp_conditional(alpha, hist_);
        return log_normal_pdf(theta, p.mean, p.var) + (a_ - 1.0) * std::log(a) + (b_ - 1.0) * std::log1p(-a);
      };
      bounded_step(alpha_[k], 0.0, 1.0, scales_[static_cast<std::size_t>(k)], target, rng, adapting);
    }
  }

  void names(std::vector<std::string>& out) const { indexed_names("alpha", alpha_.size(), out); }
  void values(std::vector<double>& out) const { out.insert(out.end(), alpha_.begin(), alpha_.end()); }
  void report(std::vector<BlockAcceptance>& out) const {
    for (const auto& s : scales_) out.push_back(s.report());
  }

 private:
  NormalHistory hist_;
  double a_, b_;
  Eigen::VectorXd alpha_;
  std::vector<AdaptiveScale> scales_;
};

class MppBetaPrior {
 public:
  MppBetaPrior(BinaryHistory hist, const CompareHyper& h, const ChainConfig& cfg)
      : hist_(std::move(hist)),
        a_(h.mpp_a),
        b_(h.mpp_b),
        alpha_(Eigen::VectorXd::Constant(hist_.size(), 0.5)),
        scales_(scales("alpha", hist_.size(), 0.3, 1.0, cfg)) {}

  Beta conditional() const { return mpp_binary_conditional(alpha_, hist_); }

  void update(double theta, Rng& rng, bool adapting) {
    for (Eigen::Index k = 0; k < alpha_.size(); ++k) {
      const auto target = [&](double a) {
        Eigen::VectorXd alpha = alpha_;
        alpha[k] = a;
        const Beta p = mpp_binary_conditional(alpha, hist_);
        return log_beta_pdf(theta, p.alpha, p.beta) + (a_ - 1.0) * std::log(a) + (b_ - 1.0) * std::log1p(-a);
      };
      bounded_step(alpha_[k], 0.0, 1.0, scales_[static_cast<std::size_t>(k)], target, rng, adapting);
    }
  }

  void names(std::vector<std::string>& out) const { indexed_names("alpha", alpha_.size(), out); }
  void values(std::vector<double>& out) const { out.insert(out.end(), alpha_.begin(), alpha_.end()); }
  void report(std::vector<BlockAcceptance>& out) const {
    for (const auto& s : scales_) out.push_back(s.report());
  }

 private:
  BinaryHistory hist_;
  double a_, b_;
  Eigen::VectorXd alpha_;
  std::vector<AdaptiveScale> scales_;
};

class LcpPrior {
 public:
  LcpPrior(NormalHistory hist, const CompareHyper& h, const ChainConfig& cfg)
      : hist_(std::move(hist)),
        lo_(h.lcp_log_tau_lower),
        hi_(h.lcp_log_tau_upper),
        log_tau_(Eigen::VectorXd::Constant(hist_.size(), std::clamp(0.0, lo_, hi_))),
        scales_(scales("tau", hist_.size(), 2.0, hi_ - lo_, cfg)) {}

  std::optional<Normal> conditional() const { return lcp_conditional(log_tau_.array().exp().matrix(), hist_); }

  void update(double theta, Rng& rng, bool adapting) {
    for (Eigen::Index k = 0; k < log_tau_.size(); ++k) {
      const auto target = [&](double lt) {
        Eigen::VectorXd tau = log_tau_.array().exp().matrix();
        tau[k] = std::exp(lt);
        const Normal p = lcp_conditional(tau, hist_);
        return log_normal_pdf(theta, p.mean, p.var);
      };
      bounded_step(log_tau_[k], lo_, hi_, scales_[static_cast<std::size_t>(k)], target, rng, adapting);
    }
  }

  void names(std::vector<std::string>& out) const { indexed_names("tau", log_tau_.size(), out); }
  void values(std::vector<double>& out) const {
    for (double lt : log_tau_) out.push_back(std::exp(lt));
  }
  void report(std::vector<BlockAcceptance>& out) const {
    for (const auto& s : scales_) out.push_back(s.report());
  }

 private:
  NormalHistory hist_;
  double lo_, hi_;
  Eigen::VectorXd log_tau_;
  std::vector<AdaptiveScale> scales_;
};

/// Shared tau block of MAP and rMAP: random walk on log tau, HalfNormal(scale) prior on tau.
class TauBlock {
 public:
  TauBlock(double scale, const ChainConfig& cfg)
      : scale_(scale), log_tau_(std::log(0.5 * scale)), step_("tau", 1.0, cfg.target_accept, cfg.adapt_window) {}

  double tau() const { return std::exp(log_tau_); }

  template <class LogLik>
  void update(LogLik&& log_lik, Rng& rng, bool adapting) {
    const auto target = [&](double lt) {
      const double t = std::exp(lt);
      return log_lik(t) - 0.5 * t * t / (scale_ * scale_) + lt;
    };
    const double proposal = log_tau_ + step_.scale() * rng.normal();
    const double log_ratio = target(proposal) - target(log_tau_);
    const bool ok = std::isfinite(log_ratio) && accept_log_ratio(log_ratio, rng);
    if (ok) log_tau_ = proposal;
    step_.record(ok, adapting);
  }

  BlockAcceptance report() const { return step_.report(); }

 private:
  double scale_;
  double log_tau_;
  AdaptiveScale step_;
};

class MapPrior {
 public:
  MapPrior(NormalHistory hist, const CompareHyper& h, const ChainConfig& cfg)
      : hist_(std::move(hist)), tau_(h.map_tau_scale, cfg) {}

  std::optional<Normal> conditional() const { return map_conditional(tau_.tau(), hist_); }

  void update(double theta, Rng& rng, bool adapting) {
    tau_.update(
        [&](double t) {
          const Normal p = map_conditional(t, hist_);
          return log_normal_pdf(theta, p.mean, p.var);
        },
        rng, adapting);
  }

  void names(std::vector<std::string>& out) const { out.emplace_back("tau"); }
  void values(std::vector<double>& out) const { out.push_back(tau_.tau()); }
  void report(std::vector<BlockAcceptance>& out) const { out.push_back(tau_.report()); }

 private:
  NormalHistory hist_;
  TauBlock tau_;
};

class RmapPrior {
 public:
  RmapPrior(NormalHistory hist, const CompareHyper& h, const ChainConfig& cfg)
      : hist_(std::move(hist)),
        weight_(h.rmap_robust_weight),
        vague_{pooled_mean(hist_), h.rmap_vague_var},
        tau_(h.map_tau_scale, cfg) {}

  std::optional<Normal> conditional() const {
    if (vague_selected_) return vague_;
    return map_conditional(tau_.tau(), hist_);
  }

  void update(double theta, Rng& rng, bool adapting) {
    // indicator | theta, tau
    const Normal informative = map_conditional(tau_.tau(), hist_);
    const double lv = std::log(weight_) + log_normal_pdf(theta, vague_.mean, vague_.var);
    const double li = std::log1p(-weight_) + log_normal_pdf(theta, informative.mean, informative.var);
    const double top = std::max(lv, li);
    const double p_vague = std::exp(lv - top) / (std::exp(lv - top) + std::exp(li - top));
    vague_selected_ = rng.uniform() < p_vague;

    // tau | theta, indicator; under the vague component only the prior acts on tau
    tau_.update(
        [&](double t) {
          if (vague_selected_) return 0.0;
          const Normal p = map_conditional(t, hist_);
          return log_normal_pdf(theta, p.mean, p.var);
        },
        rng, adapting);
  }

  void names(std::vector<std::string>& out) const { out.insert(out.end(), {"tau", "vague"}); }
  void values(std::vector<double>& out) const {
    out.push_back(tau_.tau());
    out.push_back(vague_selected_ ? 1.0 : 0.0);
  }
  void report(std::vector<BlockAcceptance>& out) const { out.push_back(tau_.report()); }

 private:
  NormalHistory hist_;
  double weight_;
  Normal vague_;
  TauBlock tau_;
  bool vague_selected_ = false;
};

Normal pooled_fixed_prior(const NormalHistory& hist) {
  return precision_weighted(hist.sampling_var.cwiseInverse(), hist.estimate);
}

template <class Lik>
Chain run_normal_method(Lik& lik, const NormalHistory& hist, Method method, const CompareHyper& hyper,
                        const ChainConfig& cfg, std::optional<Normal> baseline) {
  switch (method) {
    case Method::Jeffreys: {
      FixedNormalPrior prior(baseline);
      return run_sampler(lik, prior, cfg);
    }
    case Method::FullBorrow: {
      FixedNormalPrior prior(pooled_fixed_prior(hist));
      return run_sampler(lik, prior, cfg);
    }
    case Method::Mpp: {
      MppPrior prior(hist, hyper, cfg);
      return run_sampler(lik, prior, cfg);
    }
    case Method::Lcp: {
      LcpPrior prior(hist, hyper, cfg);
      return run_sampler(lik, prior, cfg);
    }
    case Method::Map: {
      MapPrior prior(hist, hyper, cfg);
      return run_sampler(lik, prior, cfg);
    }
    case Method::Rmap: {
      RmapPrior prior(hist, hyper, cfg);
      return run_sampler(lik, prior, cfg);
    }
    default:
      throw Error(Errc::ConfigError, std::string("method ") + to_string(method) + " is not a comparison prior");
  }
}

}  // namespace
}  // namespace detail

Chain sample_compare(const ContinuousSummary& current, const NormalHistory& hist, Method method,
                     const CompareHyper& hyper, const ChainConfig& cfg) {
  hyper.validate();
  SamplerOptions opts;
  opts.invga_zeta = hyper.invga_zeta;
  detail::NormalMeanBlock lik(current, opts);
  return detail::run_normal_method(lik, hist, method, hyper, cfg, std::nullopt);
}

Chain sample_compare(const TwoArmGroupStats& current, const NormalHistory& slope_hist, Method method,
                     const CompareHyper& hyper, const ChainConfig& cfg, double intercept_prior_var) {
  hyper.validate();
  SamplerOptions opts;
  opts.invga_zeta = hyper.invga_zeta;
  opts.intercept_prior_var = intercept_prior_var;
  detail::TwoArmBlock lik(current, opts);
  return detail::run_normal_method(lik, slope_hist, method, hyper, cfg, Normal{0.0, intercept_prior_var});
}

Chain sample_compare(const BinarySummary& current, std::span<const BinarySummary> hist, Method method,
                     const CompareHyper& hyper, const ChainConfig& cfg) {
  hyper.validate();
  constexpr Beta jeffreys{0.5, 0.5};
  switch (method) {
    case Method::Jeffreys: {
      detail::BernoulliBlock lik(current);
      detail::FixedBetaPrior prior(jeffreys);
      return detail::run_sampler(lik, prior, cfg);
    }
    case Method::FullBorrow: {
      detail::BernoulliBlock lik(pool(current, hist));
      detail::FixedBetaPrior prior(jeffreys);
      return detail::run_sampler(lik, prior, cfg);
    }
    case Method::Mpp: {
      detail::BernoulliBlock lik(current);
      detail::MppBetaPrior prior(make_history(hist), hyper, cfg);
      return detail::run_sampler(lik, prior, cfg);
    }
    default:
      throw Error(Errc::UnsupportedEndpoint,
                  std::string("method ") + to_string(method) + " is not available for binary endpoints");
  }
}

Chain sample_compare(const StudySet& studies, Method method, const CompareHyper& hyper, const ChainConfig& cfg) {
  const auto& cur = studies.current().data;
  switch (studies.kind()) {
    case EndpointKind::Continuous: {
      const auto hist = studies.historical_as<ContinuousSummary>();
      const auto& c = std::get<ContinuousSummary>(cur);
      if (method == Method::FullBorrow) {
        hyper.validate();
        SamplerOptions opts;
        opts.invga_zeta = hyper.invga_zeta;
        return sample_normal_mean(pool(c, hist), std::nullopt, cfg, opts);
      }
      return sample_compare(c, make_history(hist), method, hyper, cfg);
    }
    case EndpointKind::Binary: {
      const auto hist = studies.historical_as<BinarySummary>();
      return sample_compare(std::get<BinarySummary>(cur), hist, method, hyper, cfg);
    }
    case EndpointKind::TwoArm: {
      const auto& c = std::get<TwoArmGroupStats>(cur);
      bool all_two_arm = true;
      for (const auto& h : studies.historical()) all_two_arm &= kind_of(h.data) == EndpointKind::TwoArm;
      if (method == Method::FullBorrow && all_two_arm) {
        hyper.validate();
        SamplerOptions opts;
        opts.invga_zeta = hyper.invga_zeta;
        return sample_two_arm(pool(c, studies.historical_as<TwoArmGroupStats>()), Normal{0.0, 100.0}, cfg, opts);
      }
      return sample_compare(c, slope_history(studies), method, hyper, cfg);
    }
    case EndpointKind::Coefficient:
      break;
  }
  throw Error(Errc::UnsupportedEndpoint, "comparison priors need a continuous, binary or two-arm current study");
}

}  // namespace uip
