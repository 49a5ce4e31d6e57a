#include "uip/ess.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "uip/error.hpp"
#include "uip/random.hpp"

namespace uip {

double conditional_ess_continuous(double m, const Eigen::VectorXd& w, double sigma2_current,
                                  const NormalHistory& hist) {
  return sigma2_current * m * w.dot(hist.unit_info);
}

double conditional_ess_binary(double m, const Eigen::VectorXd& w, const BinaryHistory& hist) {
  const double mu = w.dot(hist.rate);
  const double var = 1.0 / (m * w.dot(hist.unit_info));
  if (!(var < mu * (1.0 - mu))) throw Error(Errc::InvalidPriorMoments, "Beta moment condition fails");
  return m * mu * (1.0 - mu) * w.dot(hist.unit_info) - 1.0;
}

namespace {

template <class Fn>
double posterior_mean_of(const Chain& chain, Eigen::Index k, Fn&& fn) {
  const auto& m = chain.draws("M");
  std::vector<const std::vector<double>*> w(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) w[static_cast<std::size_t>(j)] = &chain.draws("w" + std::to_string(j + 1));
  double total = 0.0;
  Eigen::VectorXd wi(k);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (Eigen::Index j = 0; j < k; ++j) wi[j] = (*w[static_cast<std::size_t>(j)])[i];
    total += fn(m[i], wi);
  }
  return total / static_cast<double>(m.size());
}

}  // namespace

double posterior_ess(const Chain& chain, double sigma2_current, const NormalHistory& hist) {
  return posterior_mean_of(chain, hist.size(), [&](double m, const Eigen::VectorXd& w) {
    return conditional_ess_continuous(m, w, sigma2_current, hist);
  });
}

double posterior_ess_binary(const Chain& chain, const BinaryHistory& hist) {
  return posterior_mean_of(chain, hist.size(),
                           [&](double m, const Eigen::VectorXd& w) { return conditional_ess_binary(m, w, hist); });
}

void MarginalEssOptions::validate() const {
  if (grid_max < 1) throw Error(Errc::ConfigError, "ESS grid_max must be >= 1");
  if (mc_draws < 1000) throw Error(Errc::ConfigError, "ESS mc_draws must be >= 1000");
  if (!(inflation > 1.0)) throw Error(Errc::ConfigError, "ESS inflation factor must exceed 1");
  if (batches < 2 || batches > mc_draws) throw Error(Errc::ConfigError, "ESS batches must lie in [2, mc_draws]");
}

namespace {

struct HyperDraw {
  double m;
  Eigen::VectorXd w;
};

HyperDraw draw_hyper(const AmountPrior& amount, const WeightSpec& weights, Rng& rng) {
  HyperDraw d;
  d.m = amount.is_fixed() ? amount.value() : std::max(kMinAmount, amount.value() * rng.uniform());
  d.w = weights.is_fixed() ? weights.weights().values() : rng.dirichlet(weights.gamma());
  return d;
}

/// Moments of one conditional prior draw (and its Beta shapes for binary endpoints).
struct DrawSummary {
  double mean;
  double var;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Integer minimizer of |target - precision(m)| on [0, grid_max]; precision is nondecreasing in m.
long grid_argmin(double target, long grid_max, const std::function<double(double)>& precision) {
  long lo = 0, hi = grid_max;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (precision(static_cast<double>(mid)) < target)
      lo = mid;
    else
      hi = mid;
  }
  return std::fabs(target - precision(static_cast<double>(lo))) <= std::fabs(target - precision(static_cast<double>(hi)))
             ? lo
             : hi;
}

/// Shared driver: `moments` maps a hyper draw to its conditional prior (mean, var), or nullopt to reject it;
/// `eps_precision(draws, theta_bar, m)` gives the averaged epsilon-posterior precision after m pseudo-observations,
/// and `continuous_m(draws, theta_bar, prior_precision)` the unrounded minimizer used for the MC error.
template <class Moments, class EpsPrecision, class ContinuousM>
EssResult marginal_driver(const AmountPrior& amount, const WeightSpec& weights, const MarginalEssOptions& opts,
                          Moments&& moments, EpsPrecision&& eps_precision, ContinuousM&& continuous_m,
                          const char* method) {
  opts.validate();
  Rng rng(opts.seed);
  std::vector<DrawSummary> draws;
  draws.reserve(static_cast<std::size_t>(opts.mc_draws));
  long attempts = 0;
  while (static_cast<long>(draws.size()) < opts.mc_draws) {
    if (++attempts > 100 * opts.mc_draws)
      throw Error(Errc::InvalidPriorMoments, "hyper-prior rarely yields a valid conditional prior");
    const auto h = draw_hyper(amount, weights, rng);
    if (auto d = moments(h)) draws.push_back(*d);
  }

  const auto pieces = [&](std::span<const DrawSummary> part) {
    double mean = 0.0, var = 0.0;
    for (const auto& d : part) mean += d.mean;
    mean /= static_cast<double>(part.size());
    for (const auto& d : part) var += d.var + (d.mean - mean) * (d.mean - mean);
    var /= static_cast<double>(part.size());
    return std::pair{mean, 1.0 / var};
  };

  const auto [theta_bar, prior_precision] = pieces(draws);
  const std::span<const DrawSummary> all(draws);
  const long m = grid_argmin(prior_precision, opts.grid_max,
                             [&](double mm) { return eps_precision(all, theta_bar, mm); });
  if (m >= opts.grid_max)
    throw Error(Errc::GridExhausted, "marginal ESS minimizer reached the grid maximum " + std::to_string(opts.grid_max));

  const std::size_t per = draws.size() / static_cast<std::size_t>(opts.batches);
  double s = 0.0, ss = 0.0;
  for (int b = 0; b < opts.batches; ++b) {
    const auto part = all.subspan(static_cast<std::size_t>(b) * per, per);
    const auto [tb, pp] = pieces(part);
    const double v = continuous_m(part, tb, pp);
    s += v;
    ss += v * v;
  }
  const double nb = static_cast<double>(opts.batches);
  const double var = std::max(0.0, (ss - s * s / nb) / (nb - 1.0));

  EssResult r;
  r.value = static_cast<double>(m);
  r.method = method;
  r.mc_error = std::sqrt(var / nb);
  return r;
}

}  // namespace

EssResult marginal_ess(double sigma2_current, const NormalHistory& hist, const AmountPrior& amount,
                       const WeightSpec& weights, const MarginalEssOptions& opts) {
  const double inflation = opts.inflation;
  const auto moments = [&](const HyperDraw& h) -> std::optional<DrawSummary> {
    const Normal p = uip_normal(h.m, h.w, hist);
    return DrawSummary{p.mean, p.var};
  };
  // averaged precision of the epsilon-posterior: E_j[1 / (inflation eta_j^2)] + m / sigma^2
  const auto base = [inflation](std::span<const DrawSummary> d) {
    double s = 0.0;
    for (const auto& x : d) s += 1.0 / (inflation * x.var);
    return s / static_cast<double>(d.size());
  };
  const auto eps_precision = [&](std::span<const DrawSummary> d, double, double m) {
    return base(d) + m / sigma2_current;
  };
  const auto continuous_m = [&](std::span<const DrawSummary> d, double, double prior_precision) {
    return std::max(0.0, (prior_precision - base(d)) * sigma2_current);
  };
  return marginal_driver(amount, weights, opts, moments, eps_precision, continuous_m, "marginal_continuous");
}

EssResult marginal_ess(const BinaryHistory& hist, const AmountPrior& amount, const WeightSpec& weights,
                       const MarginalEssOptions& opts) {
  const double inflation = opts.inflation;
  const auto moments = [&](const HyperDraw& h) -> std::optional<DrawSummary> {
    const double mu = h.w.dot(hist.rate);
    const double var = 1.0 / (h.m * h.w.dot(hist.unit_info));
    if (!(var < mu * (1.0 - mu))) return std::nullopt;
    const Beta b = beta_from_moments(mu, var);
    return DrawSummary{mu, var, b.alpha, b.beta};
  };
  // epsilon-prior of draw j: Beta(alpha_j / inflation, beta_j / inflation), updated by m theta_bar
  // fractional successes out of m
  const auto eps_precision = [inflation](std::span<const DrawSummary> d, double theta_bar, double m) {
    double s = 0.0;
    for (const auto& x : d) {
      const Beta post{x.alpha / inflation + m * theta_bar, x.beta / inflation + m * (1.0 - theta_bar)};
      s += 1.0 / post.var();
    }
    return s / static_cast<double>(d.size());
  };
  const auto continuous_m = [&](std::span<const DrawSummary> d, double theta_bar, double prior_precision) {
    double lo = 0.0, hi = static_cast<double>(opts.grid_max);
    if (eps_precision(d, theta_bar, lo) >= prior_precision) return 0.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eps_precision(d, theta_bar, mid) < prior_precision ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return marginal_driver(amount, weights, opts, moments, eps_precision, continuous_m, "marginal_binary");
}

}  // namespace uip
