#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uip/chain.hpp"
#include "uip/compare.hpp"
#include "uip/core.hpp"
#include "uip/data.hpp"
#include "uip/js_weights.hpp"

namespace uip {

/// Noninformative two-arm fit of one study.
struct StudyFit {
  std::string label;
  long n = 0;
  PosteriorSummary beta0;
  PosteriorSummary beta1;
};

/// Gibbs fit under beta0, beta1 ~ N(0, prior_var), sigma^2 ~ InvGa(0.01, 0.01).
StudyFit fit_separate(const TwoArmGroupStats& study, const ChainConfig& cfg, std::string label = {},
                      double prior_var = 100.0);

/// How the unit information of the slope is obtained.
///   observed          n_treatment / (n sigma_hat^2), available when group statistics are given
///   inverse_variance  1 / (n se^2) from the fitted (or published) standard error
enum class SlopeInfo { Observed, InverseVariance };

const char* to_string(SlopeInfo s) noexcept;
SlopeInfo parse_slope_info(std::string_view name);

struct MethodResult {
  Method method = Method::Jeffreys;
  PosteriorSummary beta0;
  PosteriorSummary beta1;
  /// posterior mean weights (uip_dirichlet) or the fixed weights (uip_js)
  std::optional<Eigen::VectorXd> weights;
  std::optional<double> m_mean;
  /// conditional ESS averaged over the posterior
  std::optional<double> ess;
  /// marginal ESS with M at its posterior mean and w over its hyper-prior
  std::optional<double> marginal_ess;
  std::optional<Eigen::VectorXd> js_distances;
  std::vector<BlockAcceptance> acceptance;
};

struct RegressionOptions {
  std::vector<Method> methods{Method::UipDirichlet, Method::UipJs, Method::Mpp, Method::Lcp, Method::Rmap};
  ChainConfig chain;
  CompareHyper hyper;
  /// Upper bound of M ~ Uniform(0, U); defaults to the current sample size.
  std::optional<double> amount_upper;
  SlopeInfo slope_info = SlopeInfo::Observed;
  double prior_var = 100.0;
  long ess_mc_draws = 4000;
};

struct RegressionReport {
  std::string current_label;
  std::vector<std::string> historical_labels;
  /// current study first, then the historical studies in input order
  std::vector<StudyFit> separate;
  std::vector<MethodResult> borrowing;
};

/// Slope history built from separate fits: estimate and se from the posterior, unit information per `mode`.
NormalHistory slope_history_from_fits(const std::vector<StudyFit>& fits, const std::vector<TwoArmGroupStats>& stats,
                                      SlopeInfo mode);

/// Separate fits of the current study (first) and every historical study; fit i uses seed
/// derive_seed(opts.chain.seed, i).
std::vector<StudyFit> fit_all(const StudySet& studies, const RegressionOptions& opts);

/// JS distances of the slope posteriors; historical posteriors of studies larger than n_current are
/// widened by n_k / n_current.
DistanceReport slope_js_distances(const StudyFit& current, std::span<const StudyFit> historical);

/// Per-study fits, then one borrowing analysis on beta1 per requested method. All studies must be two-arm.
RegressionReport analyze_regression(const StudySet& studies, const RegressionOptions& opts);

void write_json(const RegressionReport& report, std::ostream& out);
/// One row per fit x parameter: section,name,parameter,estimate,lower,upper,sd
void write_csv(const RegressionReport& report, std::ostream& out);

}  // namespace uip
