#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uip/chain.hpp"
#include "uip/compare.hpp"
#include "uip/core.hpp"
#include "uip/data.hpp"
#include "uip/js_weights.hpp"

namespace uip {

/// Hyper-prior configuration shared by every method of one analysis.
struct BorrowingSpec {
  CompareHyper hyper;
  /// M ~ Uniform(0, U); U defaults to the combined historical sample size.
  std::optional<double> amount_upper;
  /// Fixes M instead (conditional analyses).
  std::optional<double> amount_fixed;
  /// Patient-level outcomes for the JS subsampling route (continuous and binary endpoints).
  std::vector<std::optional<PatientLevel>> historical_records;
  std::optional<PatientLevel> current_records;
  int js_repeats = 100;
  std::uint64_t js_seed = 1;
};

AmountPrior amount_prior(const StudySet& studies, const BorrowingSpec& spec);

/// Weights of UIP-JS from the summary statistics (surrogate route when n_k > n).
DistanceReport js_report(const StudySet& studies, const BorrowingSpec& spec);

/// Posterior chain of `method` on a continuous, binary or two-arm study set.
/// For UIP-JS the distance report is written to `js` when given.
Chain run_method(const StudySet& studies, Method method, const BorrowingSpec& spec, const ChainConfig& cfg,
                 DistanceReport* js = nullptr);

/// Name of the parameter of interest in chains of this endpoint ("theta" or "beta1").
const char* focus_parameter(EndpointKind kind) noexcept;

}  // namespace uip
