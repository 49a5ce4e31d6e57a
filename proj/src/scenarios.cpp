#include "uip/scenarios.hpp"

#include <cmath>

#include "uip/error.hpp"

namespace uip {

void SimulationRun::set_replications(long reps) {
  scenario.replications = reps;
  ess_study.replications = reps;
}

void SimulationRun::set_seed(std::uint64_t seed) {
  scenario.master_seed = seed;
  scenario.chain.seed = seed;
  ess_study.master_seed = seed;
}

void SimulationRun::set_threads(int threads) {
  scenario.threads = threads;
  ess_study.threads = threads;
}

ScenarioResult run_simulation(const SimulationRun& run) {
  if (run.type == "ess") return run_ess_study(run.ess_study);
  if (run.type == "trend") return run_trend(run.scenario);
  if (run.type == "estimation") return run_estimation(run.scenario);
  if (run.type == "test") return run_test(run.scenario, run.theta0, run.level);
  if (run.type == "testing") {
    if (!run.theta0) throw Error(Errc::ConfigError, "testing study needs theta0");
    return run_testing_study(run.scenario, *run.theta0, run.level, run.target_size);
  }
  throw Error(Errc::ConfigError, "unknown simulation type '" + run.type + "'");
}

std::vector<double> linear_grid(double from, double to, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) {
    const double x = from + (to - from) * i / (points - 1);
    g.push_back(std::round(x * 1e10) / 1e10);
  }
  return g;
}

namespace {

const std::vector<Method> kAllMethods{Method::Jeffreys, Method::FullBorrow, Method::Mpp,       Method::Lcp,
                                      Method::Rmap,     Method::UipDirichlet, Method::UipJs};
const std::vector<Method> kUip{Method::UipDirichlet, Method::UipJs};

SimulationRun ess_run(std::string name, EndpointKind kind) {
  SimulationRun r;
  r.name = std::move(name);
  r.type = "ess";
  r.ess_study.kind = kind;
  r.ess_study.m_grid = linear_grid(50, 150, 11);
  r.ess_study.replications = 100;
  if (kind == EndpointKind::Binary) {
    r.ess_study.current = {0.5, 1.0, 100};
    r.ess_study.mean_lower = 0.4;
    r.ess_study.mean_upper = 0.6;
  }
  return r;
}

SimulationRun trend_run(std::string name, EndpointKind kind, std::vector<double> hist_means, std::vector<double> grid) {
  SimulationRun r;
  r.name = std::move(name);
  r.type = "trend";
  Scenario& s = r.scenario;
  s.kind = kind;
  s.current = {0.0, 1.0, 40};
  for (double m : hist_means) s.historical.push_back({m, 1.0, 40});
  s.grid = std::move(grid);
  s.methods = kUip;
  s.replications = 100;
  s.amount_upper = 40.0;
  return r;
}

SimulationRun single_arm_run(std::string name, std::string type, long n) {
  SimulationRun r;
  r.name = std::move(name);
  r.type = std::move(type);
  Scenario& s = r.scenario;
  s.current = {0.0, 1.0, n};
  s.historical = {{0.5, 1.0, 100}, {1.0, 1.0, 50}};
  s.grid = linear_grid(0.0, 0.5, 6);
  s.methods = kAllMethods;
  s.replications = 200;
  r.theta0 = 0.0;
  return r;
}

}  // namespace

const std::vector<std::string>& canned_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "webfig1", "webfig2"};
  return names;
}

std::vector<SimulationRun> canned_runs(std::string_view figure) {
  if (figure == "fig1") return {ess_run("fig1_ess", EndpointKind::Continuous)};
  if (figure == "webfig1") return {ess_run("webfig1_ess", EndpointKind::Binary)};
  if (figure == "fig2")
    return {trend_run("fig2_amount", EndpointKind::Continuous, {-0.3, 0.3}, linear_grid(0.3, 0.9, 7)),
            trend_run("fig2_weights", EndpointKind::Continuous, {-0.3, 0.3}, linear_grid(-0.3, 0.3, 7))};
  if (figure == "webfig2")
    return {trend_run("webfig2_amount", EndpointKind::Binary, {0.2, 0.4}, linear_grid(0.4, 0.7, 7)),
            trend_run("webfig2_weights", EndpointKind::Binary, {0.2, 0.8}, linear_grid(0.2, 0.8, 7))};
  if (figure == "fig3")
    return {single_arm_run("fig3_n60", "estimation", 60), single_arm_run("fig3_n120", "estimation", 120)};
  if (figure == "fig4")
    return {single_arm_run("fig4_n60", "testing", 60), single_arm_run("fig4_n120", "testing", 120)};
  throw Error(Errc::ConfigError, "unknown figure '" + std::string(figure) + "'");
}

}  // namespace uip
