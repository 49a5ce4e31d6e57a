#include "uip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "uip/borrow.hpp"
#include "uip/error.hpp"
#include "uip/ess.hpp"
#include "uip/js_weights.hpp"
#include "uip/random.hpp"

namespace uip {

void Scenario::validate() const {
  if (kind != EndpointKind::Continuous && kind != EndpointKind::Binary)
    throw Error(Errc::ConfigError, "scenarios simulate continuous or binary endpoints");
  if (replications < 1) throw Error(Errc::ConfigError, "replications must be >= 1");
  if (grid.empty()) throw Error(Errc::ConfigError, "scenario grid is empty");
  if (methods.empty()) throw Error(Errc::ConfigError, "scenario lists no methods");
  if (historical.empty()) throw Error(Errc::ConfigError, "scenario needs at least one historical population");
  if (threads < 1) throw Error(Errc::ConfigError, "threads must be >= 1");
  const auto check = [this](const Population& p, bool is_current) {
    if (p.n < (kind == EndpointKind::Continuous ? 2 : 1))
      throw Error(Errc::ConfigError, "population sample size too small");
    if (kind == EndpointKind::Continuous && !(p.sd > 0.0)) throw Error(Errc::ConfigError, "population sd must be > 0");
    if (kind == EndpointKind::Binary && !is_current && !(p.mean >= 0.0 && p.mean <= 1.0))
      throw Error(Errc::ConfigError, "binary population rate must lie in [0, 1]");
  };
  check(current, true);
  for (const auto& h : historical) check(h, false);
  if (kind == EndpointKind::Binary)
    for (double g : grid)
      if (!(g >= 0.0 && g <= 1.0)) throw Error(Errc::ConfigError, "binary grid values must lie in [0, 1]");
  chain.validate();
  hyper.validate();
}

void EssStudy::validate() const {
  if (kind != EndpointKind::Continuous && kind != EndpointKind::Binary)
    throw Error(Errc::ConfigError, "ESS study simulates continuous or binary endpoints");
  if (historical_n.empty()) throw Error(Errc::ConfigError, "ESS study needs historical sample sizes");
  if (m_grid.empty()) throw Error(Errc::ConfigError, "ESS study M grid is empty");
  if (replications < 1) throw Error(Errc::ConfigError, "replications must be >= 1");
  if (!(mean_lower <= mean_upper) || !(sd_lower <= sd_upper)) throw Error(Errc::ConfigError, "empty sampling range");
  if (threads < 1) throw Error(Errc::ConfigError, "threads must be >= 1");
}

std::vector<MetricRow> ScenarioResult::series(const std::string& method, const std::string& metric) const {
  std::vector<MetricRow> out;
  for (const auto& r : rows)
    if (r.method == method && r.metric == metric) out.push_back(r);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.grid_value < b.grid_value; });
  return out;
}

namespace {

/// Runs job(i) for i in [0, count) on `threads` workers. Results must be written to per-index slots.
void parallel_for(long count, int threads, const std::function<void(long)>& job) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const int n = static_cast<int>(std::min<long>(threads, count));
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (long i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

DatasetSummary simulate_dataset(EndpointKind kind, const Population& p, Rng& rng) {
  if (kind == EndpointKind::Binary) return BinarySummary(p.n, rng.binomial(p.n, p.mean));
  const double n = static_cast<double>(p.n);
  const double mean = p.mean + p.sd * rng.normal() / std::sqrt(n);
  const double sd = p.sd * std::sqrt(rng.chi_squared(n - 1.0) / (n - 1.0));
  return ContinuousSummary(p.n, mean, sd);
}

/// Innovations of the current dataset, reused across grid values.
struct CurrentNoise {
  double z = 0.0;
  double chi2 = 0.0;
  std::vector<double> u;
};

CurrentNoise draw_noise(EndpointKind kind, const Population& p, Rng& rng) {
  CurrentNoise c;
  if (kind == EndpointKind::Binary) {
    c.u.resize(static_cast<std::size_t>(p.n));
    for (auto& v : c.u) v = rng.uniform();
  } else {
    c.z = rng.normal();
    c.chi2 = rng.chi_squared(static_cast<double>(p.n) - 1.0);
  }
  return c;
}

DatasetSummary current_dataset(EndpointKind kind, const Population& p, double theta, const CurrentNoise& c) {
  if (kind == EndpointKind::Binary) {
    const long y = std::count_if(c.u.begin(), c.u.end(), [theta](double v) { return v < theta; });
    return BinarySummary(p.n, y);
  }
  const double n = static_cast<double>(p.n);
  return ContinuousSummary(p.n, theta + p.sd * c.z / std::sqrt(n), p.sd * std::sqrt(c.chi2 / (n - 1.0)));
}

struct Band {
  double mean, lo, hi;
};

Band percentile_band(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return {mean_of(v), sorted_quantile(v, 0.025), sorted_quantile(v, 0.975)};
}

Band rate_band(long hits, long reps) {
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  const double half = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  return {p, std::max(0.0, p - half), std::min(1.0, p + half)};
}

void push_row(ScenarioResult& r, double g, Method m, const std::string& metric, Band b, long reps) {
  r.rows.push_back({g, to_string(m), metric, b.mean, b.lo, b.hi, reps});
}

ScenarioResult empty_result(const Scenario& s) {
  ScenarioResult r;
  r.replications = s.replications;
  r.seed = s.master_seed;
  return r;
}

}  // namespace

OutcomeCube simulate_outcomes(const Scenario& s, double theta0) {
  s.validate();
  const std::size_t G = s.grid.size(), M = s.methods.size();
  const auto R = static_cast<std::size_t>(s.replications);
  OutcomeCube cube(G, std::vector<std::vector<Outcome>>(M, std::vector<Outcome>(R)));

  BorrowingSpec spec;
  spec.hyper = s.hyper;
  spec.amount_upper = s.amount_upper;

  parallel_for(s.replications, s.threads, [&](long rep) {
    const std::uint64_t rep_seed = derive_seed(s.master_seed, static_cast<std::uint64_t>(rep));
    Rng rng(rep_seed);
    std::vector<LabeledSummary> hist;
    for (std::size_t k = 0; k < s.historical.size(); ++k)
      hist.push_back({"D" + std::to_string(k + 1), simulate_dataset(s.kind, s.historical[k], rng)});
    const CurrentNoise noise = draw_noise(s.kind, s.current, rng);

    for (std::size_t g = 0; g < G; ++g) {
      const double truth = s.grid[g];
      const StudySet studies({"D", current_dataset(s.kind, s.current, truth, noise)}, hist);
      for (std::size_t mi = 0; mi < M; ++mi) {
        ChainConfig cfg = s.chain;
        cfg.seed = derive_seed(rep_seed, mi + 1);
        const Chain chain = run_method(studies, s.methods[mi], spec, cfg);
        const auto& theta = chain.draws("theta");
        std::vector<double> sorted(theta.begin(), theta.end());
        std::sort(sorted.begin(), sorted.end());
        Outcome& o = cube[g][mi][static_cast<std::size_t>(rep)];
        const PosteriorSummary ps = posterior_summary(theta);
        o.post_mean = ps.estimate;
        o.post_var = ps.sd * ps.sd;
        o.level_truth = critical_level(sorted, truth);
        o.level_theta0 = critical_level(sorted, theta0);
        if (chain.has("M")) {
          o.m_mean = mean_of(chain.draws("M"));
          for (std::size_t k = 0; k < hist.size(); ++k) o.w_mean.push_back(mean_of(chain.draws("w" + std::to_string(k + 1))));
        }
      }
    }
  });
  return cube;
}

ScenarioResult run_trend(const Scenario& s) {
  for (Method m : s.methods)
    if (!is_uip(m)) throw Error(Errc::ConfigError, "trend runs take UIP methods only");
  const OutcomeCube cube = simulate_outcomes(s);
  ScenarioResult r = empty_result(s);
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    for (std::size_t mi = 0; mi < s.methods.size(); ++mi) {
      const auto& reps = cube[g][mi];
      std::vector<double> m;
      for (const auto& o : reps) m.push_back(o.m_mean);
      push_row(r, s.grid[g], s.methods[mi], "M", percentile_band(m), s.replications);
      for (std::size_t k = 0; k < s.historical.size(); ++k) {
        std::vector<double> w, mw;
        for (const auto& o : reps) {
          w.push_back(o.w_mean[k]);
          mw.push_back(o.m_mean * o.w_mean[k]);
        }
        push_row(r, s.grid[g], s.methods[mi], "w" + std::to_string(k + 1), percentile_band(w), s.replications);
        push_row(r, s.grid[g], s.methods[mi], "Mw" + std::to_string(k + 1), percentile_band(mw), s.replications);
      }
    }
  }
  return r;
}

ScenarioResult run_estimation(const Scenario& s) {
  const OutcomeCube cube = simulate_outcomes(s);
  ScenarioResult r = empty_result(s);
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    for (std::size_t mi = 0; mi < s.methods.size(); ++mi) {
      std::vector<double> bias, var, mse;
      for (const auto& o : cube[g][mi]) {
        const double b = o.post_mean - s.grid[g];
        bias.push_back(std::fabs(b));
        var.push_back(o.post_var);
        mse.push_back(o.post_var + b * b);
      }
      push_row(r, s.grid[g], s.methods[mi], "abs_bias", percentile_band(bias), s.replications);
      push_row(r, s.grid[g], s.methods[mi], "variance", percentile_band(var), s.replications);
      push_row(r, s.grid[g], s.methods[mi], "mse", percentile_band(mse), s.replications);
    }
  }
  return r;
}

namespace {

long count_rejections(const std::vector<Outcome>& reps, bool at_truth, double level) {
  long hits = 0;
  for (const auto& o : reps) hits += (at_truth ? o.level_truth : o.level_theta0) > level;
  return hits;
}

}  // namespace

ScenarioResult run_test(const Scenario& s, std::optional<double> theta0, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::BadLevel, "test level must lie in (0, 1)");
  const OutcomeCube cube = simulate_outcomes(s, theta0.value_or(0.0));
  ScenarioResult r = empty_result(s);
  for (std::size_t g = 0; g < s.grid.size(); ++g)
    for (std::size_t mi = 0; mi < s.methods.size(); ++mi)
      push_row(r, s.grid[g], s.methods[mi], "reject",
               rate_band(count_rejections(cube[g][mi], !theta0, level), s.replications), s.replications);
  return r;
}

double calibrate_level(std::span<const double> critical_levels, double target, double nominal) {
  if (critical_levels.empty()) throw Error(Errc::EmptyChain, "no replications to calibrate");
  if (!(target > 0.0 && target < 1.0)) throw Error(Errc::BadLevel, "target size must lie in (0, 1)");
  const auto reps = static_cast<double>(critical_levels.size());
  const auto rate = [&](double level) {
    return static_cast<double>(std::count_if(critical_levels.begin(), critical_levels.end(),
                                             [level](double c) { return c > level; })) /
           reps;
  };
  if (rate(1.0) > target) throw Error(Errc::Uncalibratable, "size exceeds the target even at the widest interval");
  if (rate(nominal) == target) return nominal;
  // rate is a nonincreasing step function of the level; bisect for the smallest level meeting the target
  double lo = 0.0, hi = 1.0;
  if (rate(lo) <= target) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

namespace {

std::map<Method, Calibration> calibrate_from(const Scenario& s, const std::vector<std::vector<Outcome>>& at_null,
                                             double target, double nominal) {
  std::map<Method, Calibration> out;
  for (std::size_t mi = 0; mi < s.methods.size(); ++mi) {
    std::vector<double> levels;
    for (const auto& o : at_null[mi]) levels.push_back(o.level_truth);
    Calibration c;
    c.nominal_size = static_cast<double>(count_rejections(at_null[mi], true, nominal)) / static_cast<double>(levels.size());
    try {
      c.level = calibrate_level(levels, target, nominal);
    } catch (const Error& e) {
      if (e.code() != Errc::Uncalibratable) throw;
    }
    out[s.methods[mi]] = c;
  }
  return out;
}

}  // namespace

std::map<Method, Calibration> calibrate_size(const Scenario& s, double theta0, double target_size, double nominal) {
  Scenario null = s;
  null.grid = {theta0};
  const OutcomeCube cube = simulate_outcomes(null, theta0);
  return calibrate_from(null, cube[0], target_size, nominal);
}

ScenarioResult run_testing_study(const Scenario& s, double theta0, double level, double target_size,
                                 std::map<Method, Calibration>* calibration) {
  const auto at = std::find_if(s.grid.begin(), s.grid.end(), [theta0](double g) { return std::fabs(g - theta0) < 1e-12; });
  if (at == s.grid.end()) throw Error(Errc::ConfigError, "theta0 must be one of the grid values");
  const OutcomeCube cube = simulate_outcomes(s, theta0);
  const auto cal = calibrate_from(s, cube[static_cast<std::size_t>(at - s.grid.begin())], target_size, level);
  if (calibration) *calibration = cal;

  ScenarioResult r = empty_result(s);
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    for (std::size_t mi = 0; mi < s.methods.size(); ++mi) {
      const auto& reps = cube[g][mi];
      push_row(r, s.grid[g], s.methods[mi], "size", rate_band(count_rejections(reps, true, level), s.replications),
               s.replications);
      push_row(r, s.grid[g], s.methods[mi], "power", rate_band(count_rejections(reps, false, level), s.replications),
               s.replications);
      const auto& c = cal.at(s.methods[mi]);
      if (c.level)
        push_row(r, s.grid[g], s.methods[mi], "power_calibrated",
                 rate_band(count_rejections(reps, false, *c.level), s.replications), s.replications);
    }
  }
  for (std::size_t mi = 0; mi < s.methods.size(); ++mi) {
    const auto& c = cal.at(s.methods[mi]);
    const double v = c.level ? *c.level : std::nan("");
    push_row(r, theta0, s.methods[mi], "calibrated_level", {v, v, v}, s.replications);
  }
  return r;
}

ScenarioResult run_ess_study(const EssStudy& s) {
  s.validate();
  const std::size_t G = s.m_grid.size(), R = static_cast<std::size_t>(s.replications);
  std::vector<std::vector<double>> cond(G, std::vector<double>(R)), marg(G, std::vector<double>(R));
  const double grid_top = *std::max_element(s.m_grid.begin(), s.m_grid.end());

  parallel_for(s.replications, s.threads, [&](long rep) {
    const std::uint64_t rep_seed = derive_seed(s.master_seed, static_cast<std::uint64_t>(rep));
    Rng rng(rep_seed);
    const auto draw = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    std::vector<LabeledSummary> hist;
    for (std::size_t k = 0; k < s.historical_n.size(); ++k) {
      const long nk = s.historical_n[k];
      const double mean = draw(s.mean_lower, s.mean_upper);
      if (s.kind == EndpointKind::Binary) {
        hist.push_back({"D" + std::to_string(k + 1), BinarySummary(nk, std::lround(mean * static_cast<double>(nk)))});
      } else {
        const double sd = draw(s.sd_lower, s.sd_upper);
        hist.push_back({"D" + std::to_string(k + 1), ContinuousSummary(nk, mean, sd)});
      }
    }
    const DatasetSummary current =
        s.kind == EndpointKind::Binary
            ? DatasetSummary(BinarySummary(s.current.n, std::lround(s.current.mean * static_cast<double>(s.current.n))))
            : DatasetSummary(ContinuousSummary(s.current.n, s.current.mean, s.current.sd));
    const StudySet studies({"D", current}, hist);
    const WeightVector w_js = js_weights(js_distances(studies));
    std::vector<long> nk(s.historical_n.begin(), s.historical_n.end());
    const WeightSpec dir = WeightSpec::dirichlet(dirichlet_gammas(s.current.n, nk));

    MarginalEssOptions eo;
    eo.mc_draws = s.mc_draws;
    eo.grid_max = static_cast<long>(std::ceil(10.0 * grid_top)) + 100;
    for (std::size_t g = 0; g < G; ++g) {
      const double m = s.m_grid[g];
      eo.seed = derive_seed(rep_seed, g + 1);
      double c = 0.0, mg = 0.0;
      if (s.kind == EndpointKind::Binary) {
        const BinaryHistory h = make_history(std::span<const BinarySummary>(studies.historical_as<BinarySummary>()));
        c = conditional_ess_binary(m, w_js.values(), h);
        mg = marginal_ess(h, AmountPrior::fixed(m), dir, eo).value;
      } else {
        const NormalHistory h =
            make_history(std::span<const ContinuousSummary>(studies.historical_as<ContinuousSummary>()));
        const double sigma2 = s.current.sd * s.current.sd;
        c = conditional_ess_continuous(m, w_js.values(), sigma2, h);
        mg = marginal_ess(sigma2, h, AmountPrior::fixed(m), dir, eo).value;
      }
      cond[g][static_cast<std::size_t>(rep)] = c;
      marg[g][static_cast<std::size_t>(rep)] = mg;
    }
  });

  ScenarioResult r;
  r.replications = s.replications;
  r.seed = s.master_seed;
  for (std::size_t g = 0; g < G; ++g) {
    const Band bc = percentile_band(cond[g]);
    const Band bm = percentile_band(marg[g]);
    r.rows.push_back({s.m_grid[g], "uip", "conditional_ess", bc.mean, bc.lo, bc.hi, s.replications});
    r.rows.push_back({s.m_grid[g], "uip", "marginal_ess", bm.mean, bm.lo, bm.hi, s.replications});
  }
  return r;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

void write_csv(const ScenarioResult& r, std::ostream& out) {
  out << "grid_value,method,metric,mean,lo95,hi95,n_reps\n";
  for (const auto& row : r.rows)
    out << format_double(row.grid_value) << ',' << row.method << ',' << row.metric << ',' << format_double(row.mean)
        << ',' << format_double(row.lo95) << ',' << format_double(row.hi95) << ',' << row.n_reps << '\n';
}

}  // namespace uip
