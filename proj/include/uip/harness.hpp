#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uip/chain.hpp"
#include "uip/compare.hpp"
#include "uip/data.hpp"

namespace uip {

/// Population a dataset is simulated from: Normal(mean, sd^2) or Bernoulli(mean).
struct Population {
  double mean = 0.0;
  double sd = 1.0;
  long n = 0;
};

struct Scenario {
  EndpointKind kind = EndpointKind::Continuous;
  /// current population; its mean is replaced by each grid value
  Population current;
  std::vector<Population> historical;
  std::vector<Method> methods;
  long replications = 200;
  std::uint64_t master_seed = 1;
  std::vector<double> grid;
  ChainConfig chain;
  CompareHyper hyper;
  /// Upper bound of M ~ Uniform(0, U); defaults to the combined historical sample size.
  std::optional<double> amount_upper;
  int threads = 1;

  /// Throws ConfigError.
  void validate() const;
};

/// Aggregate of one metric over replications. For per-replication quantities lo95/hi95 are the
/// 2.5% and 97.5% replication percentiles; for rejection rates they are a normal-approximation band.
struct MetricRow {
  double grid_value = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  long n_reps = 0;
};

struct ScenarioResult {
  std::vector<MetricRow> rows;
  long replications = 0;
  std::uint64_t seed = 0;

  /// rows matching (method, metric) ordered by grid value
  std::vector<MetricRow> series(const std::string& method, const std::string& metric) const;
};

/// Per replication and grid point draws current and historical data; the current-data innovations
/// are shared across grid points and methods, and chain seeds are shared across grid points.
struct Outcome {
  double post_mean = 0.0;
  double post_var = 0.0;
  /// critical CI level for H0: theta = truth, and for H0: theta = theta0
  double level_truth = 0.0;
  double level_theta0 = 0.0;
  double m_mean = 0.0;
  std::vector<double> w_mean;
};

/// outcomes[grid][method][replication]
using OutcomeCube = std::vector<std::vector<std::vector<Outcome>>>;

OutcomeCube simulate_outcomes(const Scenario& s, double theta0 = 0.0);

/// Posterior means of M, w_k and M w_k (UIP methods only).
ScenarioResult run_trend(const Scenario& s);
/// abs_bias, variance, mse with the grid value as the true theta.
ScenarioResult run_estimation(const Scenario& s);
/// Rejection rate of H0: theta = theta0 with equal-tailed CIs at `level`; theta0 = nullopt tests the
/// truth at every grid point (size curve).
ScenarioResult run_test(const Scenario& s, std::optional<double> theta0, double level = 0.95);

struct Calibration {
  /// adjusted CI level, absent when uncalibratable
  std::optional<double> level;
  double nominal_size = 0.0;
};

/// Per-replication critical levels -> smallest level whose empirical rejection rate is <= target.
/// Returns nominal when the rate at nominal already equals the target. Throws Uncalibratable when
/// even the full-range interval rejects more often than target.
double calibrate_level(std::span<const double> critical_levels, double target, double nominal = 0.95);

/// Simulates under theta = theta0 and calibrates every method. Uncalibratable methods get no level.
std::map<Method, Calibration> calibrate_size(const Scenario& s, double theta0, double target_size,
                                             double nominal = 0.95);

/// Size (H0 at truth), power (H0: theta = theta0) and calibrated power in one pass over the same chains.
/// Calibration uses the replications at the grid point equal to theta0, which must be on the grid.
ScenarioResult run_testing_study(const Scenario& s, double theta0, double level, double target_size,
                                 std::map<Method, Calibration>* calibration = nullptr);

struct EssStudy {
  EndpointKind kind = EndpointKind::Continuous;
  Population current{0.0, 1.0, 100};
  std::vector<long> historical_n{80, 100, 120};
  double mean_lower = -0.5, mean_upper = 0.5;
  double sd_lower = 0.9, sd_upper = 1.1;
  std::vector<double> m_grid;
  long replications = 100;
  std::uint64_t master_seed = 1;
  long mc_draws = 4000;
  int threads = 1;

  void validate() const;
};

/// Conditional ESS (JS weights) and marginal ESS (Dirichlet weights) per M, per replication.
/// Metrics: conditional_ess, marginal_ess.
ScenarioResult run_ess_study(const EssStudy& s);

/// grid_value,method,metric,mean,lo95,hi95,n_reps
void write_csv(const ScenarioResult& r, std::ostream& out);

/// Formats a double with the shortest round-trip representation.
std::string format_double(double x);

}  // namespace uip
