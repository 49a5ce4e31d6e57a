#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uip/harness.hpp"

namespace uip {

/// One simulation study: a Scenario or an EssStudy plus the study type that consumes it.
struct SimulationRun {
  /// file stem of the CSV written for this run
  std::string name;
  /// trend | estimation | test | testing | ess
  std::string type = "estimation";
  Scenario scenario;
  EssStudy ess_study;
  std::optional<double> theta0;
  double level = 0.95;
  double target_size = 0.05;

  void set_replications(long reps);
  void set_seed(std::uint64_t seed);
  void set_threads(int threads);
};

/// Dispatches on run.type. "testing" needs theta0.
ScenarioResult run_simulation(const SimulationRun& run);

/// Figure setups: fig1, fig2, fig3, fig4, webfig1, webfig2. Unknown names throw ConfigError.
std::vector<SimulationRun> canned_runs(std::string_view figure);
const std::vector<std::string>& canned_names();

/// Evenly spaced grid from `from` to `to` inclusive.
std::vector<double> linear_grid(double from, double to, int points);

}  // namespace uip
