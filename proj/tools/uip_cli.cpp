// uip: borrowing analyses, weights, ESS and simulation studies from a YAML config.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "memantine_config.hpp"
#include "uip/analysis.hpp"
#include "uip/config.hpp"
#include "uip/error.hpp"
#include "uip/mcmc.hpp"
#include "uip/regression.hpp"
#include "uip/scenarios.hpp"

namespace fs = std::filesystem;
using namespace uip;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> reps;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Overrides& o, bool config_required) {
  auto* c = cmd->add_option("--config", o.config, "YAML config file");
  if (config_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
  cmd->add_option("--reps", o.reps, "replications per grid point (simulations)")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "worker threads (simulations)")->check(CLI::PositiveNumber);
}

void apply(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.set_seed(*o.seed);
  if (o.out) cfg.output = *o.out;
  if (o.threads) {
    cfg.threads = *o.threads;
    if (cfg.simulation) cfg.simulation->set_threads(*o.threads);
  }
  if (o.reps && cfg.simulation) cfg.simulation->set_replications(*o.reps);
}

std::ofstream open_output(const std::string& dir, const std::string& file) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string fmt(double x, int digits = 3) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string ci(const PosteriorSummary& s) { return "(" + fmt(s.lower) + ", " + fmt(s.upper) + ")"; }

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

RegressionOptions regression_options(const RunConfig& cfg) {
  if (cfg.borrowing.amount_fixed) throw Error(Errc::ConfigError, "two-arm analyses take amount.prior: uniform");
  RegressionOptions o;
  o.methods = cfg.methods;
  o.chain = cfg.chain;
  o.hyper = cfg.borrowing.hyper;
  o.amount_upper = cfg.borrowing.amount_upper;
  o.slope_info = cfg.slope_info;
  o.prior_var = cfg.prior_var;
  o.ess_mc_draws = cfg.ess.marginal.mc_draws;
  return o;
}

BorrowingSpec borrowing_spec(const RunConfig& cfg) {
  BorrowingSpec spec = cfg.borrowing;
  if (cfg.current) spec.current_records = cfg.current->records;
  for (const auto& h : cfg.historical) spec.historical_records.push_back(h.records);
  return spec;
}

void print_regression(const RegressionReport& r) {
  std::printf("Separate fits (beta1 = treatment effect)\n");
  std::printf("  %-14s %6s %9s  %-20s\n", "study", "n", "beta1", "95% CI");
  for (const auto& f : r.separate)
    std::printf("  %-14s %6ld %9s  %-20s\n", f.label.c_str(), f.n, fmt(f.beta1.estimate).c_str(), ci(f.beta1).c_str());
  std::printf("\nBorrowing analyses of %s; weights in the order:", r.current_label.c_str());
  for (const auto& l : r.historical_labels) std::printf(" %s", l.c_str());
  std::printf("\n  %-14s %9s  %-20s %8s %8s  %s\n", "method", "beta1", "95% CI", "M", "ESS", "weights");
  for (const auto& m : r.borrowing)
    std::printf("  %-14s %9s  %-20s %8s %8s  %s\n", to_string(m.method), fmt(m.beta1.estimate).c_str(),
                ci(m.beta1).c_str(), m.m_mean ? fmt(*m.m_mean, 1).c_str() : "-", m.ess ? fmt(*m.ess, 1).c_str() : "-",
                m.weights ? join(*m.weights).c_str() : "-");
}

void print_analysis(const AnalysisReport& r) {
  std::printf("Posterior of theta for %s (%s)", r.current_label.c_str(), to_string(r.kind));
  if (!r.historical_labels.empty()) {
    std::printf("; weights in the order:");
    for (const auto& l : r.historical_labels) std::printf(" %s", l.c_str());
  }
  std::printf("\n  %-14s %9s  %-20s %8s %8s  %s\n", "method", "theta", "95% CI", "M", "ESS", "weights");
  for (const auto& m : r.results)
    std::printf("  %-14s %9s  %-20s %8s %8s  %s\n", to_string(m.method), fmt(m.theta.estimate).c_str(),
                ci(m.theta).c_str(), m.m_mean ? fmt(*m.m_mean, 1).c_str() : "-", m.ess ? fmt(*m.ess, 1).c_str() : "-",
                m.weights ? join(*m.weights).c_str() : "-");
}

void write_reports(const std::string& dir, const auto& report) {
  auto json = open_output(dir, "report.json");
  write_json(report, json);
  auto csv = open_output(dir, "report.csv");
  write_csv(report, csv);
}

int analyze(const RunConfig& cfg) {
  if (!cfg.current) throw ConfigFileError(cfg.path, 1, "config has no 'current' study");
  if (cfg.historical.empty()) {
    for (Method m : cfg.methods)
      if (m != Method::Jeffreys)
        throw ConfigFileError(cfg.path, cfg.current->line, "method '" + std::string(to_string(m)) +
                                                               "' needs historical studies");
    const LabeledSummary cur{cfg.current->label, cfg.current->data};
    if (const auto* s = std::get_if<TwoArmGroupStats>(&cur.data)) {
      RegressionReport r;
      r.current_label = cur.label;
      r.separate.push_back(fit_separate(*s, cfg.chain, cur.label, cfg.prior_var));
      print_regression(r);
      write_reports(cfg.output, r);
    } else {
      const AnalysisReport r = analyze_single(cur, cfg.chain);
      print_analysis(r);
      write_reports(cfg.output, r);
    }
    return 0;
  }
  const StudySet studies = cfg.studies();
  if (studies.kind() == EndpointKind::TwoArm) {
    const RegressionReport r = analyze_regression(studies, regression_options(cfg));
    print_regression(r);
    write_reports(cfg.output, r);
  } else {
    const AnalysisReport r = analyze_summaries(studies, cfg.methods, borrowing_spec(cfg), cfg.chain);
    print_analysis(r);
    write_reports(cfg.output, r);
  }
  return 0;
}

int weights(const RunConfig& cfg) {
  const StudySet studies = cfg.studies();
  DistanceReport d;
  if (studies.kind() == EndpointKind::TwoArm) {
    const auto fits = fit_all(studies, regression_options(cfg));
    d = slope_js_distances(fits.front(), std::span<const StudyFit>(fits).subspan(1));
  } else {
    d = js_report(studies, borrowing_spec(cfg));
  }
  const WeightVector w = js_weights(d);
  nlohmann::ordered_json doc;
  doc["current"] = studies.current().label;
  doc["repeats"] = d.repeats_used;
  auto& rows = doc["historical"] = nlohmann::ordered_json::array();
  auto csv = open_output(cfg.output, "weights.csv");
  csv << "study,distance,weight,subsampled\n";
  std::printf("  %-14s %12s %8s  %s\n", "study", "JS distance", "weight", "subsampled");
  for (std::size_t k = 0; k < studies.historical().size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const std::string& label = studies.historical()[k].label;
    rows.push_back({{"study", label}, {"distance", d.d[i]}, {"weight", w[i]}, {"subsampled", bool(d.subsampled[k])}});
    csv << label << ',' << nlohmann::json(d.d[i]).dump() << ',' << nlohmann::json(w[i]).dump() << ','
        << (d.subsampled[k] ? "true" : "false") << '\n';
    std::printf("  %-14s %12s %8s  %s\n", label.c_str(), fmt(d.d[i], 4).c_str(), fmt(w[i]).c_str(),
                d.subsampled[k] ? "yes" : "no");
  }
  auto json = open_output(cfg.output, "weights.json");
  json << doc.dump(2) << '\n';
  return 0;
}

int ess(const RunConfig& cfg) {
  const StudySet studies = cfg.studies();
  const std::optional<double> m = cfg.ess.m ? cfg.ess.m : cfg.borrowing.amount_fixed;
  if (!m) throw ConfigFileError(cfg.path, 1, "ess needs 'ess.m' or a fixed 'amount.value'");
  if (!(*m > 0.0)) throw ConfigFileError(cfg.path, 1, "ess.m must be > 0");

  std::vector<long> nk;
  for (const auto& h : studies.historical()) nk.push_back(sample_size(h.data));
  const Eigen::VectorXd gamma = dirichlet_gammas(sample_size(studies.current().data), nk);
  const Eigen::VectorXd prior_mean = gamma / gamma.sum();
  const WeightVector js = js_weights(js_report(studies, borrowing_spec(cfg)));
  const WeightSpec dirichlet = WeightSpec::dirichlet(gamma);
  const AmountPrior amount = AmountPrior::fixed(*m);

  double cond_js = 0.0, cond_mean = 0.0;
  EssResult marg;
  if (studies.kind() == EndpointKind::Binary) {
    const auto hist = make_history(std::span<const BinarySummary>(studies.historical_as<BinarySummary>()));
    cond_js = conditional_ess_binary(*m, js.values(), hist);
    cond_mean = conditional_ess_binary(*m, prior_mean, hist);
    marg = marginal_ess(hist, amount, dirichlet, cfg.ess.marginal);
  } else {
    NormalHistory hist;
    double sigma2 = 0.0;
    const auto& cur = studies.current().data;
    if (const auto* c = std::get_if<ContinuousSummary>(&cur)) {
      hist = make_history(std::span<const ContinuousSummary>(studies.historical_as<ContinuousSummary>()));
      sigma2 = c->sd() * c->sd();
    } else {
      hist = slope_history(studies);
      if (const auto* t = std::get_if<TwoArmGroupStats>(&cur))
        sigma2 = 1.0 / unit_info_two_arm_slope(*t);
      else
        sigma2 = 1.0 / unit_info_coefficient(std::get<CoefficientSummary>(cur));
    }
    cond_js = conditional_ess_continuous(*m, js.values(), sigma2, hist);
    cond_mean = conditional_ess_continuous(*m, prior_mean, sigma2, hist);
    marg = marginal_ess(sigma2, hist, amount, dirichlet, cfg.ess.marginal);
  }

  nlohmann::ordered_json doc{{"current", studies.current().label},
                             {"M", *m},
                             {"conditional_js", cond_js},
                             {"conditional_prior_mean_weights", cond_mean},
                             {"marginal_dirichlet", marg.value},
                             {"marginal_mc_error", marg.mc_error},
                             {"marginal_method", marg.method}};
  auto json = open_output(cfg.output, "ess.json");
  json << doc.dump(2) << '\n';
  std::printf("M = %s\n", fmt(*m, 2).c_str());
  std::printf("  conditional ESS, JS weights            %s\n", fmt(cond_js, 2).c_str());
  std::printf("  conditional ESS, Dirichlet mean weights %s\n", fmt(cond_mean, 2).c_str());
  std::printf("  marginal ESS, Dirichlet weights         %s (MC error %s)\n", fmt(marg.value, 1).c_str(),
              fmt(marg.mc_error, 2).c_str());
  return 0;
}

void print_result(const SimulationRun& run, const ScenarioResult& r) {
  std::printf("%s (%s, %ld replications)\n", run.name.c_str(), run.type.c_str(), r.replications);
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& row : r.rows)
    if (std::find(keys.begin(), keys.end(), std::pair{row.method, row.metric}) == keys.end())
      keys.emplace_back(row.method, row.metric);
  if (keys.empty()) return;
  std::printf("  %-14s %-18s", "method", "metric \\ grid");
  for (const auto& row : r.series(keys.front().first, keys.front().second))
    std::printf(" %8s", format_double(row.grid_value).c_str());
  std::printf("\n");
  for (const auto& [method, metric] : keys) {
    std::printf("  %-14s %-18s", method.c_str(), metric.c_str());
    for (const auto& row : r.series(method, metric)) std::printf(" %8s", fmt(row.mean).c_str());
    std::printf("\n");
  }
  std::printf("\n");
}

int simulate_runs(std::vector<SimulationRun> runs, const std::string& dir) {
  for (auto& run : runs) {
    const ScenarioResult r = run_simulation(run);
    auto csv = open_output(dir, run.name + ".csv");
    write_csv(r, csv);
    print_result(run, r);
  }
  return 0;
}

int simulate(const RunConfig& cfg) {
  if (!cfg.simulation) throw ConfigFileError(cfg.path, 1, "config has no 'scenario' block");
  return simulate_runs({*cfg.simulation}, cfg.output);
}

int replicate(const std::string& figure, const Overrides& o) {
  if (figure == "memantine") {
    RunConfig cfg = parse_config(kMemantineYaml, "memantine.yaml");
    cfg.output = "out";
    apply(cfg, o);
    return analyze(cfg);
  }
  auto runs = canned_runs(figure);
  for (auto& run : runs) {
    run.set_seed(o.seed.value_or(20240601));
    if (o.reps) run.set_replications(*o.reps);
    if (o.threads) run.set_threads(*o.threads);
  }
  return simulate_runs(std::move(runs), o.out.value_or("out"));
}

bool is_input_error(Errc c) {
  switch (c) {
    case Errc::InvalidSummary:
    case Errc::NonPositiveWidth:
    case Errc::BadLevel:
    case Errc::VariantMismatch:
    case Errc::NeedsPatientLevel:
    case Errc::ConfigError:
    case Errc::UnsupportedEndpoint:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit information prior: borrowing analyses, JS weights, ESS and simulation studies"};
  app.require_subcommand(1);
  app.footer("\nExit codes: 0 ok, 1 I/O error, 2 invalid arguments, config or record, 3 sampler or numerical failure.\n\n" +
             schema_help());

  Overrides o;
  auto* a = app.add_subcommand("analyze", "posterior of every configured method; writes report.json and report.csv");
  auto* w = app.add_subcommand("weights", "JS distances and weights; writes weights.json and weights.csv");
  auto* e = app.add_subcommand("ess", "conditional and marginal prior ESS at ess.m; writes ess.json");
  auto* s = app.add_subcommand("simulate", "runs the scenario block; writes <type>.csv");
  auto* r = app.add_subcommand("replicate", "canned figure setups and the memantine analysis");
  for (auto* cmd : {a, w, e, s}) add_common(cmd, o, true);
  add_common(r, o, false);
  std::string figure;
  std::vector<std::string> choices = canned_names();
  choices.push_back("memantine");
  r->add_option("figure", figure, "fig1 | fig2 | fig3 | fig4 | webfig1 | webfig2 | memantine")
      ->required()
      ->check(CLI::IsMember(choices));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (r->parsed()) return replicate(figure, o);
    RunConfig cfg = load_config(o.config);
    apply(cfg, o);
    if (a->parsed()) return analyze(cfg);
    if (w->parsed()) return weights(cfg);
    if (e->parsed()) return ess(cfg);
    return simulate(cfg);
  } catch (const ConfigFileError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << to_string(err.code()) << ": " << err.what() << '\n';
    return is_input_error(err.code()) ? 2 : 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
