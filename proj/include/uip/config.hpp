#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uip/borrow.hpp"
#include "uip/chain.hpp"
#include "uip/compare.hpp"
#include "uip/data.hpp"
#include "uip/ess.hpp"
#include "uip/harness.hpp"
#include "uip/js_weights.hpp"
#include "uip/regression.hpp"
#include "uip/scenarios.hpp"

namespace uip {

/// Schema violation or invalid record, anchored at a line of the config file.
class ConfigFileError : public std::runtime_error {
 public:
  ConfigFileError(const std::string& file, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// One row of the config schema; drives validation and the --help listing.
struct SchemaKey {
  const char* path;
  const char* type;
  const char* default_value;
  const char* description;
};

const std::vector<SchemaKey>& config_schema();
/// Human-readable listing of every config key.
std::string schema_help();

struct StudyRecord {
  std::string label;
  DatasetSummary data;
  std::optional<PatientLevel> records;
  int line = 0;
};

struct EssSettings {
  /// conditional ESS at this M (default: the posterior mean from analyze, or amount.value)
  std::optional<double> m;
  MarginalEssOptions marginal;
};

using SimulationSettings = SimulationRun;

struct RunConfig {
  std::string path;
  std::uint64_t seed = 20240601;
  std::string output = "out";
  int threads = 1;
  ChainConfig chain;
  std::vector<Method> methods{Method::UipDirichlet, Method::UipJs};
  BorrowingSpec borrowing;
  SlopeInfo slope_info = SlopeInfo::Observed;
  double prior_var = 100.0;
  EssSettings ess;
  std::optional<StudyRecord> current;
  std::vector<StudyRecord> historical;
  std::optional<SimulationSettings> simulation;

  /// Study set of the current and historical records. Throws ConfigFileError.
  StudySet studies() const;
  /// Overrides applied after loading: the seed propagates to the chain, JS subsampling and ESS draws.
  void set_seed(std::uint64_t s);
};

/// Parses and schema-validates a YAML config. Throws ConfigFileError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& name = "<config>");

}  // namespace uip
