#include "uip/borrow.hpp"

#include <cmath>

#include "uip/error.hpp"
#include "uip/mcmc.hpp"

namespace uip {

AmountPrior amount_prior(const StudySet& studies, const BorrowingSpec& spec) {
  if (spec.amount_fixed) return AmountPrior::fixed(*spec.amount_fixed);
  if (spec.amount_upper) return AmountPrior::uniform(*spec.amount_upper);
  double total = 0.0;
  for (const auto& h : studies.historical()) total += static_cast<double>(sample_size(h.data));
  return AmountPrior::uniform(total);
}

DistanceReport js_report(const StudySet& studies, const BorrowingSpec& spec) {
  if (studies.kind() != EndpointKind::TwoArm) 
    return js_distances(studies, spec.historical_records, spec.current_records, spec.js_repeats, spec.js_seed);
  const NormalHistory hist = slope_history(studies);
  const auto& cur = std::get<TwoArmGroupStats>(studies.current().data);
  const NormalHistory cur_hist = slope_history(StudySet(studies.current(), {studies.current()}));
  const long n = cur.n();
  const InitialPosterior cur_post = Normal{cur_hist.estimate[0], cur_hist.sampling_var[0]};
  std::vector<InitialPosterior> posts;
  for (Eigen::Index k = 0; k < hist.size(); ++k) {
    const CoefficientSummary c(hist.estimate[k], std::sqrt(hist.sampling_var[k]), static_cast<long>(hist.n[k]));
    posts.push_back(capped_initial_posterior(c, n));
  }
  DistanceReport d = js_distances(cur_post, posts);
  for (std::size_t k = 0; k < posts.size(); ++k) d.subsampled[k] = static_cast<long>(hist.n[static_cast<Eigen::Index>(k)]) > n;
  return d;
}

const char* focus_parameter(EndpointKind kind) noexcept {
  return kind == EndpointKind::TwoArm ? "beta1" : "theta";
}

Chain run_method(const StudySet& studies, Method method, const BorrowingSpec& spec, const ChainConfig& cfg,
                 DistanceReport* js) {
  if (!is_uip(method)) return sample_compare(studies, method, spec.hyper, cfg);

  std::vector<long> nk;
  for (const auto& h : studies.historical()) nk.push_back(sample_size(h.data));
  WeightSpec weights = WeightSpec::dirichlet(dirichlet_gammas(sample_size(studies.current().data), nk));
  if (method == Method::UipJs) {
    DistanceReport d = js_report(studies, spec);
    weights = WeightSpec::fixed(js_weights(d));
    if (js) *js = std::move(d);
  }
  const AmountPrior amount = amount_prior(studies, spec);
  switch (studies.kind()) {
    case EndpointKind::Continuous: return sample_uip_continuous(studies, amount, weights, cfg);
    case EndpointKind::Binary: return sample_uip_binary(studies, amount, weights, cfg);
    case EndpointKind::TwoArm: return sample_uip_regression(studies, amount, weights, cfg);
    case EndpointKind::Coefficient: break;
  }
  throw Error(Errc::UnsupportedEndpoint, "UIP sampling needs a continuous, binary or two-arm current study");
}

}  // namespace uip
