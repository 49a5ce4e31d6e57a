#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uip {

struct ChainConfig {
  long iterations = 20000;
  long burn_in = 10000;
  std::uint64_t seed = 20240601;
  /// proposals per Robbins-Monro batch during burn-in
  long adapt_window = 50;
  /// target acceptance of scalar random-walk blocks (M, alpha_k, log tau_k, tau)
  double target_accept = 0.30;
  /// target acceptance of the multivariate weight block
  double target_accept_multi = 0.25;

  /// Throws ConfigError.
  void validate() const;
};

struct BlockAcceptance {
  std::string block;
  double burn_in_rate = 0.0;
  double sampling_rate = 0.0;
  double final_scale = 0.0;
};

/// Post-burn-in draws, one column per parameter.
class Chain {
 public:
  Chain() = default;
  Chain(std::vector<std::string> names, ChainConfig config);

  void push(std::span<const double> row);
  void reserve(std::size_t rows);

  const std::vector<std::string>& names() const noexcept { return names_; }
  bool has(std::string_view name) const noexcept;
  /// Throws EmptyChain if the parameter is absent.
  const std::vector<double>& draws(std::string_view name) const;
  std::size_t size() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }

  const ChainConfig& config() const noexcept { return config_; }
  std::vector<BlockAcceptance>& acceptance() noexcept { return acceptance_; }
  const std::vector<BlockAcceptance>& acceptance() const noexcept { return acceptance_; }

  /// Header row of parameter names, then one row per draw.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  ChainConfig config_;
  std::vector<BlockAcceptance> acceptance_;
};

struct PosteriorSummary {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double sd = 0.0;
};

/// Linear-interpolation quantile of an ascending sample (R type 7).
double sorted_quantile(std::span<const double> sorted, double p);

/// Mean, sd and the equal-tailed interval at `level`. Throws EmptyChain, BadLevel.
PosteriorSummary posterior_summary(std::span<const double> draws, double level = 0.95);

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Largest CI level at which `value` still lies outside the equal-tailed interval:
/// the test rejects H0: theta = value at every level below the returned one.
/// Returns a value > 1 when `value` falls outside the whole sample range.
double critical_level(std::span<const double> sorted, double value);

}  // namespace uip
