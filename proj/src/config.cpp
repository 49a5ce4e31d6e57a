#include "uip/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "uip/error.hpp"

namespace uip {

ConfigFileError::ConfigFileError(const std::string& file, int line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

#define UIP_STUDY_KEYS(P)                                                                                     \
  {P ".label", "string", "", "study name used in reports"},                                                 \
      {P ".kind", "string", "", "continuous | binary | coefficient | two_arm"},                             \
      {P ".n", "int", "", "sample size (continuous, binary, coefficient)"},                                 \
      {P ".mean", "float", "", "sample mean (continuous)"},                                                 \
      {P ".sd", "float", "", "sample standard deviation, divisor n-1 (continuous)"},                       \
      {P ".successes", "int", "", "number of responders (binary)"},                                        \
      {P ".estimate", "float", "", "point estimate (coefficient)"},                                        \
      {P ".se", "float", "", "standard error (coefficient); or give ci_lower/ci_upper"},                    \
      {P ".ci_lower", "float", "", "lower confidence limit (coefficient)"},                                \
      {P ".ci_upper", "float", "", "upper confidence limit (coefficient)"},                                \
      {P ".ci_level", "float", "0.95", "confidence level of the interval"},                                \
      {P ".treatment", "map", "", "treatment arm (two_arm)"},                                              \
      {P ".treatment.n", "int", "", "treatment arm size"},                                                 \
      {P ".treatment.mean", "float", "", "treatment arm mean"},                                            \
      {P ".treatment.sd", "float", "", "treatment arm sample sd"},                                         \
      {P ".control", "map", "", "control arm (two_arm)"},                                                  \
      {P ".control.n", "int", "", "control arm size"},                                                     \
      {P ".control.mean", "float", "", "control arm mean"},                                                \
      {P ".control.sd", "float", "", "control arm sample sd"},                                             \
      {P ".records", "list<float>", "", "patient-level outcomes (0/1 for binary); enables JS subsampling"}

const std::vector<SchemaKey> kSchema{
    {"seed", "int", "20240601", "master seed for chains, JS subsampling, ESS draws and simulations"},
    {"output", "string", "out", "output directory"},
    {"threads", "int", "1", "worker threads for simulation replications"},
    {"methods", "list<string>", "[uip_dirichlet, uip_js]",
     "jeffreys | full_borrow | mpp | lcp | map | rmap | uip_dirichlet | uip_js"},
    {"chain", "map", "", "sampler settings"},
    {"chain.iterations", "int", "20000", "total iterations per chain (>= 1000)"},
    {"chain.burn_in", "int", "10000", "adaptive burn-in iterations, discarded"},
    {"chain.adapt_window", "int", "50", "proposals per adaptation batch"},
    {"chain.target_accept", "float", "0.30", "target acceptance of scalar random-walk blocks"},
    {"chain.target_accept_multi", "float", "0.25", "target acceptance of the weight block"},
    {"amount", "map", "", "hyper-prior of the amount parameter M"},
    {"amount.prior", "string", "uniform", "uniform | fixed"},
    {"amount.upper", "float", "sum of historical n", "U of M ~ Uniform(0, U)"},
    {"amount.value", "float", "", "M when amount.prior is fixed"},
    {"hyper", "map", "", "comparison-prior hyper-parameters"},
    {"hyper.mpp_a", "float", "1", "alpha_k ~ Beta(a, b)"},
    {"hyper.mpp_b", "float", "1", "alpha_k ~ Beta(a, b)"},
    {"hyper.lcp_log_tau_lower", "float", "-30", "log tau_k ~ Uniform(lower, upper)"},
    {"hyper.lcp_log_tau_upper", "float", "30", "log tau_k ~ Uniform(lower, upper)"},
    {"hyper.map_tau_scale", "float", "1", "tau ~ HalfNormal(scale)"},
    {"hyper.rmap_robust_weight", "float", "0.1", "weight of the vague rMAP component"},
    {"hyper.rmap_vague_var", "float", "10000", "variance of the vague rMAP component"},
    {"hyper.invga_zeta", "float", "0.01", "sigma^2 ~ InvGamma(zeta, zeta)"},
    {"regression", "map", "", "two-arm analyses"},
    {"regression.slope_info", "string", "observed", "observed | inverse_variance unit information of the slope"},
    {"regression.prior_var", "float", "100", "variance of the N(0, v) priors of the separate fits and intercept"},
    {"js", "map", "", "Jensen-Shannon weights"},
    {"js.repeats", "int", "100", "subsamples per oversized historical study"},
    {"ess", "map", "", "effective sample size"},
    {"ess.m", "float", "", "M of the conditional ESS in the ess command"},
    {"ess.grid_max", "int", "1000", "largest m scanned by the marginal ESS"},
    {"ess.mc_draws", "int", "4000", "hyper-prior draws of the marginal ESS"},
    {"ess.inflation", "float", "10000", "variance inflation of the epsilon-information prior"},
    {"current", "map", "", "the current study record"},
    UIP_STUDY_KEYS("current"),
    {"historical", "list<map>", "", "historical study records, same fields as current"},
    UIP_STUDY_KEYS("historical[]"),
    {"scenario", "map", "", "simulation scenario (simulate command)"},
    {"scenario.type", "string", "estimation", "trend | estimation | test | testing | ess"},
    {"scenario.kind", "string", "continuous", "continuous | binary"},
    {"scenario.current", "map", "", "current population; its mean is swept over the grid"},
    {"scenario.current.mean", "float", "0", "current mean (ess type; otherwise replaced by the grid)"},
    {"scenario.current.sd", "float", "1", "current population sd"},
    {"scenario.current.n", "int", "", "current sample size"},
    {"scenario.historical", "list<map>", "", "historical populations"},
    {"scenario.historical[].mean", "float", "", "population mean or rate"},
    {"scenario.historical[].sd", "float", "1", "population sd"},
    {"scenario.historical[].n", "int", "", "sample size"},
    {"scenario.grid", "list<float>", "", "values of the current population mean"},
    {"scenario.methods", "list<string>", "methods", "methods to compare"},
    {"scenario.replications", "int", "200", "replications per grid point"},
    {"scenario.amount_upper", "float", "sum of historical n", "U of M ~ Uniform(0, U)"},
    {"scenario.theta0", "float", "", "null value; omitted in test type means the size curve"},
    {"scenario.level", "float", "0.95", "credible level of the test"},
    {"scenario.target_size", "float", "0.05", "calibration target (testing type)"},
    {"scenario.historical_n", "list<int>", "[80, 100, 120]", "historical sample sizes (ess type)"},
    {"scenario.mean_range", "list<float>", "[-0.5, 0.5]", "range of historical means or rates (ess type)"},
    {"scenario.sd_range", "list<float>", "[0.9, 1.1]", "range of historical sds (ess type)"},
    {"scenario.m_grid", "list<float>", "", "values of M (ess type)"},
    {"scenario.mc_draws", "int", "4000", "hyper-prior draws of the marginal ESS (ess type)"},
};

#undef UIP_STUDY_KEYS

const SchemaKey* find_key(const std::string& path) {
  for (const auto& k : kSchema)
    if (path == k.path) return &k;
  return nullptr;
}

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

class Reader {
 public:
  explicit Reader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigFileError(file_, line_of(at), msg);
  }
  [[noreturn]] void fail(int line, const std::string& msg) const { throw ConfigFileError(file_, line, msg); }

  void validate(const YAML::Node& node, const std::string& prefix) const {
    if (!node.IsMap()) fail(node, (prefix.empty() ? std::string("document") : "'" + prefix + "'") + " must be a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const std::string path = prefix.empty() ? key : prefix + "." + key;
      const SchemaKey* k = find_key(path);
      if (!k) fail(kv.first, "unknown key '" + path + "'");
      check_type(kv.second, path, k->type);
    }
  }

  template <class T>
  T get(const YAML::Node& map, const char* key, const std::string& path, T fallback) const {
    const YAML::Node n = map[key];
    if (!n) return fallback;
    return as<T>(n, path + "." + key);
  }

  template <class T>
  std::optional<T> maybe(const YAML::Node& map, const char* key, const std::string& path) const {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    return as<T>(n, path + "." + key);
  }

  template <class T>
  T need(const YAML::Node& map, const char* key, const std::string& path, const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, what + ": missing '" + key + "'");
    return as<T>(n, path + "." + key);
  }

  template <class T>
  T as(const YAML::Node& n, const std::string& path) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + path + "' has the wrong type");
    }
  }

  const std::string& file() const { return file_; }

 private:
  void check_type(const YAML::Node& n, const std::string& path, const std::string& type) const {
    if (type == "map") {
      validate(n, path);
    } else if (type == "list<map>") {
      if (!n.IsSequence()) fail(n, "'" + path + "' must be a list");
      for (const auto& item : n) validate(item, path + "[]");
    } else if (type.rfind("list<", 0) == 0) {
      if (!n.IsSequence()) fail(n, "'" + path + "' must be a list");
      const std::string elem = type.substr(5, type.size() - 6);
      for (const auto& item : n) check_scalar(item, path, elem);
    } else {
      check_scalar(n, path, type);
    }
  }

  void check_scalar(const YAML::Node& n, const std::string& path, const std::string& type) const {
    const std::string expected = type == "int" ? "an integer" : type == "float" ? "a number" : "a string";
    if (!n.IsScalar()) fail(n, "'" + path + "' must be " + expected);
    try {
      if (type == "int")
        (void)n.as<long long>();
      else if (type == "float")
        (void)n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + path + "' must be " + expected);
    }
  }

  std::string file_;
};

ContinuousSummary read_arm(const Reader& r, const YAML::Node& node, const std::string& path, const std::string& what) {
  return ContinuousSummary(r.need<long>(node, "n", path, what), r.need<double>(node, "mean", path, what),
                           r.need<double>(node, "sd", path, what));
}

StudyRecord read_study(const Reader& r, const YAML::Node& node, const std::string& path, const std::string& fallback_label) {
  const std::string label = r.get<std::string>(node, "label", path, fallback_label);
  const std::string what = "record '" + label + "'";
  std::optional<DatasetSummary> data;
  const std::string kind = r.need<std::string>(node, "kind", path, what);
  try {
    if (kind == "continuous") {
      data = read_arm(r, node, path, what);
    } else if (kind == "binary") {
      data = BinarySummary(r.need<long>(node, "n", path, what), r.need<long>(node, "successes", path, what));
    } else if (kind == "coefficient") {
      const double est = r.need<double>(node, "estimate", path, what);
      double se = 0.0;
      if (const auto s = r.maybe<double>(node, "se", path)) {
        se = *s;
      } else {
        se = se_from_ci(r.need<double>(node, "ci_lower", path, what), r.need<double>(node, "ci_upper", path, what),
                        r.get<double>(node, "ci_level", path, 0.95));
      }
      data = CoefficientSummary(est, se, r.need<long>(node, "n", path, what));
    } else if (kind == "two_arm") {
      if (!node["treatment"] || !node["control"]) r.fail(node, what + ": two_arm needs treatment and control");
      data = TwoArmGroupStats{read_arm(r, node["treatment"], path + ".treatment", what + " treatment arm"),
                                  read_arm(r, node["control"], path + ".control", what + " control arm")};
    } else {
      r.fail(node["kind"], what + ": unknown kind '" + kind + "'");
    }
  } catch (const Error& e) {
    r.fail(node, what + ": " + e.what());
  }
  StudyRecord rec{label, *data, std::nullopt, line_of(node)};
  if (node["records"]) {
    rec.records = PatientLevel{kind_of(rec.data), r.as<std::vector<double>>(node["records"], path + ".records")};
  }
  return rec;
}

std::vector<Method> read_methods(const Reader& r, const YAML::Node& node, const std::string& path) {
  std::vector<Method> out;
  for (const auto& item : node) {
    try {
      out.push_back(parse_method(item.as<std::string>()));
    } catch (const Error& e) {
      r.fail(item, e.what());
    }
  }
  if (out.empty()) r.fail(node, "'" + path + "' is empty");
  return out;
}

void read_simulation(const Reader& r, const YAML::Node& node, RunConfig& cfg) {
  SimulationSettings sim;
  const std::string p = "scenario";
  sim.type = r.get<std::string>(node, "type", p, "estimation");
  static const std::set<std::string> types{"trend", "estimation", "test", "testing", "ess"};
  if (!types.count(sim.type)) r.fail(node["type"], "unknown scenario type '" + sim.type + "'");
  sim.name = sim.type;
  const std::string kind = r.get<std::string>(node, "kind", p, "continuous");
  EndpointKind k;
  if (kind == "continuous")
    k = EndpointKind::Continuous;
  else if (kind == "binary")
    k = EndpointKind::Binary;
  else
    r.fail(node["kind"], "scenario kind must be continuous or binary");

  const YAML::Node cur = node["current"];
  Population current{0.0, 1.0, 0};
  if (cur) {
    current.mean = r.get<double>(cur, "mean", p + ".current", 0.0);
    current.sd = r.get<double>(cur, "sd", p + ".current", 1.0);
    current.n = r.get<long>(cur, "n", p + ".current", 0);
  }

  if (sim.type == "ess") {
    EssStudy& e = sim.ess_study;
    e.kind = k;
    e.current = current;
    if (!cur || !cur["n"]) e.current.n = 100;
    if (k == EndpointKind::Binary && !(cur && cur["mean"])) e.current.mean = 0.5;
    e.historical_n = r.get<std::vector<long>>(node, "historical_n", p, e.historical_n);
    const auto range = [&](const char* key, double& lo, double& hi) {
      if (!node[key]) return;
      const auto v = r.as<std::vector<double>>(node[key], p + "." + key);
      if (v.size() != 2) r.fail(node[key], "'" + p + "." + key + "' needs two values");
      lo = v[0];
      hi = v[1];
    };
    if (k == EndpointKind::Binary) {
      e.mean_lower = 0.4;
      e.mean_upper = 0.6;
    }
    range("mean_range", e.mean_lower, e.mean_upper);
    range("sd_range", e.sd_lower, e.sd_upper);
    if (!node["m_grid"]) r.fail(node, "ess scenario needs 'm_grid'");
    e.m_grid = r.as<std::vector<double>>(node["m_grid"], p + ".m_grid");
    e.replications = r.get<long>(node, "replications", p, 100);
    e.mc_draws = r.get<long>(node, "mc_draws", p, 4000);
    try {
      e.validate();
    } catch (const Error& err) {
      r.fail(node, err.what());
    }
  } else {
    Scenario& s = sim.scenario;
    s.kind = k;
    s.current = current;
    if (!cur || !cur["n"]) r.fail(node, "scenario needs current.n");
    if (!node["historical"]) r.fail(node, "scenario needs historical populations");
    for (const auto& h : node["historical"]) {
      Population pop;
      pop.mean = r.need<double>(h, "mean", p + ".historical[]", "historical population");
      pop.sd = r.get<double>(h, "sd", p + ".historical[]", 1.0);
      pop.n = r.need<long>(h, "n", p + ".historical[]", "historical population");
      s.historical.push_back(pop);
    }
    if (!node["grid"]) r.fail(node, "scenario needs 'grid'");
    s.grid = r.as<std::vector<double>>(node["grid"], p + ".grid");
    s.methods = node["methods"] ? read_methods(r, node["methods"], p + ".methods") : cfg.methods;
    s.replications = r.get<long>(node, "replications", p, 200);
    s.amount_upper = r.maybe<double>(node, "amount_upper", p);
    s.chain = cfg.chain;
    s.hyper = cfg.borrowing.hyper;
    sim.theta0 = r.maybe<double>(node, "theta0", p);
    sim.level = r.get<double>(node, "level", p, 0.95);
    sim.target_size = r.get<double>(node, "target_size", p, 0.05);
    try {
      s.validate();
    } catch (const Error& err) {
      r.fail(node, err.what());
    }
  }
  sim.set_threads(cfg.threads);
  cfg.simulation = std::move(sim);
}

RunConfig build(const YAML::Node& root, const std::string& file) {
  const Reader r(file);
  if (!root || root.IsNull()) r.fail(1, "empty config");
  r.validate(root, "");

  RunConfig cfg;
  cfg.path = file;
  cfg.output = r.get<std::string>(root, "output", "", "out");
  cfg.threads = r.get<int>(root, "threads", "", 1);
  if (cfg.threads < 1) r.fail(root["threads"], "threads must be >= 1");
  if (root["methods"]) cfg.methods = read_methods(r, root["methods"], "methods");

  if (const YAML::Node c = root["chain"]) {
    cfg.chain.iterations = r.get<long>(c, "iterations", "chain", cfg.chain.iterations);
    cfg.chain.burn_in = r.get<long>(c, "burn_in", "chain", cfg.chain.burn_in);
    cfg.chain.adapt_window = r.get<long>(c, "adapt_window", "chain", cfg.chain.adapt_window);
    cfg.chain.target_accept = r.get<double>(c, "target_accept", "chain", cfg.chain.target_accept);
    cfg.chain.target_accept_multi = r.get<double>(c, "target_accept_multi", "chain", cfg.chain.target_accept_multi);
    try {
      cfg.chain.validate();
    } catch (const Error& e) {
      r.fail(c, e.what());
    }
  }

  if (const YAML::Node a = root["amount"]) {
    const std::string prior = r.get<std::string>(a, "prior", "amount", "uniform");
    if (prior == "fixed") {
      cfg.borrowing.amount_fixed = r.need<double>(a, "value", "amount", "fixed amount");
      if (!(*cfg.borrowing.amount_fixed > 0.0)) r.fail(a["value"], "fixed M must be > 0");
    } else if (prior == "uniform") {
      cfg.borrowing.amount_upper = r.maybe<double>(a, "upper", "amount");
      if (cfg.borrowing.amount_upper && !(*cfg.borrowing.amount_upper > 0.0))
        r.fail(a["upper"], "amount.upper must be > 0");
    } else {
      r.fail(a["prior"], "amount.prior must be uniform or fixed");
    }
  }

  if (const YAML::Node h = root["hyper"]) {
    auto& x = cfg.borrowing.hyper;
    x.mpp_a = r.get<double>(h, "mpp_a", "hyper", x.mpp_a);
    x.mpp_b = r.get<double>(h, "mpp_b", "hyper", x.mpp_b);
    x.lcp_log_tau_lower = r.get<double>(h, "lcp_log_tau_lower", "hyper", x.lcp_log_tau_lower);
    x.lcp_log_tau_upper = r.get<double>(h, "lcp_log_tau_upper", "hyper", x.lcp_log_tau_upper);
    x.map_tau_scale = r.get<double>(h, "map_tau_scale", "hyper", x.map_tau_scale);
    x.rmap_robust_weight = r.get<double>(h, "rmap_robust_weight", "hyper", x.rmap_robust_weight);
    x.rmap_vague_var = r.get<double>(h, "rmap_vague_var", "hyper", x.rmap_vague_var);
    x.invga_zeta = r.get<double>(h, "invga_zeta", "hyper", x.invga_zeta);
    try {
      x.validate();
    } catch (const Error& e) {
      r.fail(h, e.what());
    }
  }

  if (const YAML::Node g = root["regression"]) {
    try {
      cfg.slope_info = parse_slope_info(r.get<std::string>(g, "slope_info", "regression", "observed"));
    } catch (const Error& e) {
      r.fail(g["slope_info"], e.what());
    }
    cfg.prior_var = r.get<double>(g, "prior_var", "regression", cfg.prior_var);
    if (!(cfg.prior_var > 0.0)) r.fail(g, "regression.prior_var must be > 0");
  }

  if (const YAML::Node j = root["js"]) {
    cfg.borrowing.js_repeats = r.get<int>(j, "repeats", "js", cfg.borrowing.js_repeats);
    if (cfg.borrowing.js_repeats < 1) r.fail(j, "js.repeats must be >= 1");
  }

  if (const YAML::Node e = root["ess"]) {
    cfg.ess.m = r.maybe<double>(e, "m", "ess");
    cfg.ess.marginal.grid_max = r.get<long>(e, "grid_max", "ess", cfg.ess.marginal.grid_max);
    cfg.ess.marginal.mc_draws = r.get<long>(e, "mc_draws", "ess", cfg.ess.marginal.mc_draws);
    cfg.ess.marginal.inflation = r.get<double>(e, "inflation", "ess", cfg.ess.marginal.inflation);
    try {
      cfg.ess.marginal.validate();
    } catch (const Error& err) {
      r.fail(e, err.what());
    }
  }

  if (const YAML::Node c = root["current"]) cfg.current = read_study(r, c, "current", "current");
  if (const YAML::Node h = root["historical"]) {
    int k = 0;
    for (const auto& item : h) cfg.historical.push_back(read_study(r, item, "historical[]", "D" + std::to_string(++k)));
  }
  if (const YAML::Node s = root["scenario"]) read_simulation(r, s, cfg);

  cfg.set_seed(r.get<std::uint64_t>(root, "seed", "", cfg.seed));
  return cfg;
}

}  // namespace

const std::vector<SchemaKey>& config_schema() { return kSchema; }

std::string schema_help() {
  std::ostringstream out;
  out << "Config keys (YAML):\n";
  std::size_t width = 0;
  for (const auto& k : kSchema) width = std::max(width, std::string(k.path).size());
  for (const auto& k : kSchema) {
    out << "  " << k.path << std::string(width + 2 - std::string(k.path).size(), ' ') << k.type;
    if (*k.default_value) out << " = " << k.default_value;
    out << "\n      " << k.description << '\n';
  }
  return out.str();
}

StudySet RunConfig::studies() const {
  if (!current) throw ConfigFileError(path, 1, "config has no 'current' study");
  if (historical.empty()) throw ConfigFileError(path, 1, "config has no 'historical' studies");
  std::vector<LabeledSummary> hist;
  for (const auto& h : historical) hist.push_back({h.label, h.data});
  try {
    return StudySet({current->label, current->data}, std::move(hist));
  } catch (const Error& e) {
    throw ConfigFileError(path, current->line, e.what());
  }
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  chain.seed = s;
  borrowing.js_seed = s;
  ess.marginal.seed = s;
  if (simulation) simulation->set_seed(s);
}

RunConfig parse_config(const std::string& text, const std::string& name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigFileError(name, e.mark.line + 1, e.msg);
  }
  return build(root, name);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFileError(path, 0, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace uip
