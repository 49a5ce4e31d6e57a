#include "uip/analysis.hpp"

#include <json.hpp>

#include "uip/error.hpp"
#include "uip/ess.hpp"
#include "uip/mcmc.hpp"
#include "uip/random.hpp"

namespace uip {

namespace {

double current_variance(const StudySet& studies) {
  const auto& c = std::get<ContinuousSummary>(studies.current().data);
  return c.sd() * c.sd();
}

AnalysisResult summarize(Method method, const Chain& chain) {
  AnalysisResult r;
  r.method = method;
  r.theta = posterior_summary(chain.draws("theta"));
  r.acceptance = chain.acceptance();
  return r;
}

}  // namespace

AnalysisReport analyze_summaries(const StudySet& studies, const std::vector<Method>& methods,
                                 const BorrowingSpec& spec, const ChainConfig& cfg) {
  const EndpointKind kind = studies.kind();
  if (kind != EndpointKind::Continuous && kind != EndpointKind::Binary)
    throw Error(Errc::UnsupportedEndpoint, "summary analysis needs a continuous or binary current study");
  cfg.validate();

  AnalysisReport report;
  report.kind = kind;
  report.current_label = studies.current().label;
  for (const auto& h : studies.historical()) report.historical_labels.push_back(h.label);
  const auto k = static_cast<Eigen::Index>(studies.historical().size());

  for (const Method method : methods) {
    ChainConfig c = cfg;
    c.seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(method));
    DistanceReport js;
    const Chain chain = run_method(studies, method, spec, c, &js);
    AnalysisResult r = summarize(method, chain);
    if (is_uip(method)) {
      Eigen::VectorXd w(k);
      for (Eigen::Index j = 0; j < k; ++j) w[j] = mean_of(chain.draws("w" + std::to_string(j + 1)));
      r.weights = w;
      r.m_mean = mean_of(chain.draws("M"));
      if (kind == EndpointKind::Continuous) {
        const auto hist = make_history(std::span<const ContinuousSummary>(studies.historical_as<ContinuousSummary>()));
        r.ess = posterior_ess(chain, current_variance(studies), hist);
      } else {
        const auto hist = make_history(std::span<const BinarySummary>(studies.historical_as<BinarySummary>()));
        r.ess = posterior_ess_binary(chain, hist);
      }
      if (method == Method::UipJs) r.js_distances = js.d;
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

AnalysisReport analyze_single(const LabeledSummary& current, const ChainConfig& cfg) {
  AnalysisReport report;
  report.kind = kind_of(current.data);
  report.current_label = current.label;
  ChainConfig c = cfg;
  c.seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(Method::Jeffreys));
  if (const auto* s = std::get_if<ContinuousSummary>(&current.data)) {
    report.results.push_back(summarize(Method::Jeffreys, sample_normal_mean(*s, std::nullopt, c)));
  } else if (const auto* b = std::get_if<BinarySummary>(&current.data)) {
    report.results.push_back(summarize(Method::Jeffreys, sample_rate(*b, Beta{0.5, 0.5}, c)));
  } else {
    throw Error(Errc::UnsupportedEndpoint, "single-study analysis needs a continuous or binary study");
  }
  return report;
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void write_json(const AnalysisReport& report, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["endpoint"] = to_string(report.kind);
  doc["current"] = report.current_label;
  doc["historical"] = report.historical_labels;
  auto& res = doc["methods"] = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json m{{"method", to_string(r.method)},
                             {"theta",
                              {{"estimate", r.theta.estimate},
                               {"lower", r.theta.lower},
                               {"upper", r.theta.upper},
                               {"sd", r.theta.sd}}}};
    if (r.weights) m["weights"] = to_vector(*r.weights);
    if (r.js_distances) m["js_distances"] = to_vector(*r.js_distances);
    if (r.m_mean) m["M_mean"] = *r.m_mean;
    if (r.ess) m["ess"] = *r.ess;
    auto& acc = m["acceptance"] = nlohmann::ordered_json::array();
    for (const auto& a : r.acceptance)
      acc.push_back({{"block", a.block}, {"burn_in", a.burn_in_rate}, {"sampling", a.sampling_rate}});
    res.push_back(std::move(m));
  }
  out << doc.dump(2) << '\n';
}

void write_csv(const AnalysisReport& report, std::ostream& out) {
  out << "section,name,parameter,estimate,lower,upper,sd\n";
  const auto num = [](double x) { return nlohmann::json(x).dump(); };
  for (const auto& r : report.results)
    out << "posterior," << to_string(r.method) << ",theta," << num(r.theta.estimate) << ',' << num(r.theta.lower)
        << ',' << num(r.theta.upper) << ',' << num(r.theta.sd) << '\n';
}

}  // namespace uip
