#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uip/borrow.hpp"
#include "uip/chain.hpp"
#include "uip/compare.hpp"
#include "uip/data.hpp"

namespace uip {

/// Posterior of theta under one method on a continuous or binary study set.
struct AnalysisResult {
  Method method = Method::Jeffreys;
  PosteriorSummary theta;
  std::optional<Eigen::VectorXd> weights;
  std::optional<double> m_mean;
  /// conditional ESS averaged over the posterior
  std::optional<double> ess;
  std::optional<Eigen::VectorXd> js_distances;
  std::vector<BlockAcceptance> acceptance;
};

struct AnalysisReport {
  EndpointKind kind = EndpointKind::Continuous;
  std::string current_label;
  std::vector<std::string> historical_labels;
  std::vector<AnalysisResult> results;
};

/// One chain per method; method i runs with seed derive_seed(cfg.seed, 1000 + i).
AnalysisReport analyze_summaries(const StudySet& studies, const std::vector<Method>& methods,
                                 const BorrowingSpec& spec, const ChainConfig& cfg);

/// Jeffreys posterior of a single study (no historical data).
AnalysisReport analyze_single(const LabeledSummary& current, const ChainConfig& cfg);

void write_json(const AnalysisReport& report, std::ostream& out);
/// section,name,parameter,estimate,lower,upper,sd
void write_csv(const AnalysisReport& report, std::ostream& out);

}  // namespace uip
