#include "uip/regression.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "uip/error.hpp"
#include "uip/ess.hpp"
#include "uip/js_weights.hpp"
#include "uip/mcmc.hpp"
#include "uip/random.hpp"

namespace uip {

StudyFit fit_separate(const TwoArmGroupStats& study, const ChainConfig& cfg, std::string label, double prior_var) {
  SamplerOptions opts;
  opts.intercept_prior_var = prior_var;
  const Chain chain = sample_two_arm(study, Normal{0.0, prior_var}, cfg, opts);
  StudyFit fit;
  fit.label = std::move(label);
  fit.n = study.n();
  fit.beta0 = posterior_summary(chain.draws("beta0"));
  fit.beta1 = posterior_summary(chain.draws("beta1"));
  return fit;
}

const char* to_string(SlopeInfo s) noexcept {
  return s == SlopeInfo::Observed ? "observed" : "inverse_variance";
}

SlopeInfo parse_slope_info(std::string_view name) {
  if (name == "observed") return SlopeInfo::Observed;
  if (name == "inverse_variance") return SlopeInfo::InverseVariance;
  throw Error(Errc::ConfigError, "unknown slope unit information '" + std::string(name) + "'");
}

namespace {

double slope_unit_info(const StudyFit& fit, const TwoArmGroupStats& stats, SlopeInfo mode) {
  if (mode == SlopeInfo::Observed) return unit_info_two_arm_slope(stats);
  return unit_info_coefficient(CoefficientSummary(fit.beta1.estimate, fit.beta1.sd, fit.n));
}

}  // namespace

NormalHistory slope_history_from_fits(const std::vector<StudyFit>& fits, const std::vector<TwoArmGroupStats>& stats,
                                      SlopeInfo mode) {
  const auto k = static_cast<Eigen::Index>(fits.size());
  NormalHistory h{Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& f = fits[static_cast<std::size_t>(i)];
    h.estimate[i] = f.beta1.estimate;
    h.sampling_var[i] = f.beta1.sd * f.beta1.sd;
    h.unit_info[i] = slope_unit_info(f, stats[static_cast<std::size_t>(i)], mode);
    h.n[i] = static_cast<double>(f.n);
  }
  return h;
}

namespace {

Eigen::VectorXd posterior_weights(const Chain& chain, Eigen::Index k) {
  Eigen::VectorXd w(k);
  for (Eigen::Index j = 0; j < k; ++j) w[j] = mean_of(chain.draws("w" + std::to_string(j + 1)));
  return w;
}

}  // namespace

namespace {

void require_two_arm(const StudySet& studies) {
  if (studies.kind() != EndpointKind::TwoArm)
    throw Error(Errc::UnsupportedEndpoint, "regression analysis needs a two-arm current study");
  for (const auto& h : studies.historical())
    if (kind_of(h.data) != EndpointKind::TwoArm)
      throw Error(Errc::UnsupportedEndpoint, "regression analysis needs two-arm group statistics for '" + h.label + "'");
}

}  // namespace

std::vector<StudyFit> fit_all(const StudySet& studies, const RegressionOptions& opts) {
  require_two_arm(studies);
  opts.chain.validate();
  const auto fit_cfg = [&](std::uint64_t index) {
    ChainConfig c = opts.chain;
    c.seed = derive_seed(opts.chain.seed, index);
    return c;
  };
  std::vector<StudyFit> fits;
  fits.push_back(fit_separate(std::get<TwoArmGroupStats>(studies.current().data), fit_cfg(0), studies.current().label,
                              opts.prior_var));
  const auto hist_stats = studies.historical_as<TwoArmGroupStats>();
  for (std::size_t k = 0; k < hist_stats.size(); ++k)
    fits.push_back(fit_separate(hist_stats[k], fit_cfg(k + 1), studies.historical()[k].label, opts.prior_var));
  return fits;
}

DistanceReport slope_js_distances(const StudyFit& current, std::span<const StudyFit> historical) {
  const InitialPosterior cur_post = Normal{current.beta1.estimate, current.beta1.sd * current.beta1.sd};
  std::vector<InitialPosterior> posts;
  for (const auto& f : historical)
    posts.push_back(capped_initial_posterior(CoefficientSummary(f.beta1.estimate, f.beta1.sd, f.n), current.n));
  DistanceReport d = js_distances(cur_post, posts);
  for (std::size_t k = 0; k < historical.size(); ++k) d.subsampled[k] = historical[k].n > current.n;
  return d;
}

RegressionReport analyze_regression(const StudySet& studies, const RegressionOptions& opts) {
  require_two_arm(studies);
  opts.chain.validate();
  opts.hyper.validate();

  RegressionReport report;
  report.current_label = studies.current().label;
  const auto& current = std::get<TwoArmGroupStats>(studies.current().data);
  const auto hist_stats = studies.historical_as<TwoArmGroupStats>();
  for (const auto& h : studies.historical()) report.historical_labels.push_back(h.label);
  report.separate = fit_all(studies, opts);

  const std::vector<StudyFit> hist_fits(report.separate.begin() + 1, report.separate.end());
  const NormalHistory hist = slope_history_from_fits(hist_fits, hist_stats, opts.slope_info);
  const StudyFit& cur_fit = report.separate.front();
  const double sigma2_current = 1.0 / slope_unit_info(cur_fit, current, opts.slope_info);
  const long n = current.n();
  const AmountPrior amount = AmountPrior::uniform(opts.amount_upper.value_or(static_cast<double>(n)));

  std::vector<long> nk;
  for (const auto& s : hist_stats) nk.push_back(s.n());

  SamplerOptions sopts;
  sopts.invga_zeta = opts.hyper.invga_zeta;
  sopts.intercept_prior_var = opts.prior_var;

  for (const Method method : opts.methods) {
    ChainConfig cfg = opts.chain;
    cfg.seed = derive_seed(opts.chain.seed, 1000 + static_cast<std::uint64_t>(method));
    MethodResult r;
    r.method = method;
    Chain chain;
    if (is_uip(method)) {
      WeightSpec spec = WeightSpec::dirichlet(dirichlet_gammas(n, nk));
      if (method == Method::UipJs) {
        const DistanceReport d = slope_js_distances(cur_fit, hist_fits);
        r.js_distances = d.d;
        spec = WeightSpec::fixed(js_weights(d));
      }
      chain = sample_uip_regression(current, hist, amount, spec, cfg, sopts);
      r.weights = spec.is_fixed() ? spec.weights().values() : posterior_weights(chain, hist.size());
      r.m_mean = mean_of(chain.draws("M"));
      r.ess = posterior_ess(chain, sigma2_current, hist);
      MarginalEssOptions eo;
      eo.seed = cfg.seed;
      eo.mc_draws = opts.ess_mc_draws;
      eo.grid_max = std::max(1000L, static_cast<long>(std::ceil(10.0 * amount.value())));
      r.marginal_ess = marginal_ess(sigma2_current, hist, AmountPrior::fixed(*r.m_mean), spec, eo).value;
    } else {
      chain = sample_compare(current, hist, method, opts.hyper, cfg, opts.prior_var);
    }
    r.beta0 = posterior_summary(chain.draws("beta0"));
    r.beta1 = posterior_summary(chain.draws("beta1"));
    r.acceptance = chain.acceptance();
    report.borrowing.push_back(std::move(r));
  }
  return report;
}

namespace {

nlohmann::ordered_json summary_json(const PosteriorSummary& s) {
  return {{"estimate", s.estimate}, {"lower", s.lower}, {"upper", s.upper}, {"sd", s.sd}};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void csv_row(std::ostream& out, const char* section, const std::string& name, const char* param,
             const PosteriorSummary& s) {
  out << section << ',' << name << ',' << param << ',' << nlohmann::json(s.estimate).dump() << ','
      << nlohmann::json(s.lower).dump() << ',' << nlohmann::json(s.upper).dump() << ','
      << nlohmann::json(s.sd).dump() << '\n';
}

}  // namespace

void write_json(const RegressionReport& report, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["current"] = report.current_label;
  doc["historical"] = report.historical_labels;
  auto& sep = doc["separate"] = nlohmann::ordered_json::array();
  for (const auto& f : report.separate)
    sep.push_back({{"study", f.label}, {"n", f.n}, {"beta0", summary_json(f.beta0)}, {"beta1", summary_json(f.beta1)}});
  auto& bor = doc["borrowing"] = nlohmann::ordered_json::array();
  for (const auto& r : report.borrowing) {
    nlohmann::ordered_json m{{"method", to_string(r.method)},
                             {"beta0", summary_json(r.beta0)},
                             {"beta1", summary_json(r.beta1)}};
    if (r.weights) m["weights"] = to_vector(*r.weights);
    if (r.js_distances) m["js_distances"] = to_vector(*r.js_distances);
    if (r.m_mean) m["M_mean"] = *r.m_mean;
    if (r.ess) m["ess"] = *r.ess;
    if (r.marginal_ess) m["marginal_ess"] = *r.marginal_ess;
    auto& acc = m["acceptance"] = nlohmann::ordered_json::array();
    for (const auto& a : r.acceptance)
      acc.push_back({{"block", a.block}, {"burn_in", a.burn_in_rate}, {"sampling", a.sampling_rate}});
    bor.push_back(std::move(m));
  }
  out << doc.dump(2) << '\n';
}

void write_csv(const RegressionReport& report, std::ostream& out) {
  out << "section,name,parameter,estimate,lower,upper,sd\n";
  for (const auto& f : report.separate) {
    csv_row(out, "separate", f.label, "beta0", f.beta0);
    csv_row(out, "separate", f.label, "beta1", f.beta1);
  }
  for (const auto& r : report.borrowing) {
    csv_row(out, "borrowing", to_string(r.method), "beta0", r.beta0);
    csv_row(out, "borrowing", to_string(r.method), "beta1", r.beta1);
  }
}

}  // namespace uip
