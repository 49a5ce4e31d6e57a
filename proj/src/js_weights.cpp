#include "uip/js_weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uip/error.hpp"
#include "uip/random.hpp"
#include "uip/special.hpp"

namespace uip {

namespace {

constexpr double kDistanceFloor = 1e-6;

struct InitialPosteriorVisitor {
  InitialPosterior operator()(const ContinuousSummary& s) const {
    return Normal{s.mean(), mle_variance(s) / static_cast<double>(s.n())};
  }
  InitialPosterior operator()(const BinarySummary& b) const {
    return Beta{static_cast<double>(b.successes()) + 0.5, static_cast<double>(b.n() - b.successes()) + 0.5};
  }
  InitialPosterior operator()(const CoefficientSummary& c) const { return Normal{c.estimate(), c.se() * c.se()}; }
  InitialPosterior operator()(const TwoArmGroupStats&) const {
    throw Error(Errc::UnsupportedEndpoint,
                "two-arm studies need a coefficient summary (fit_separate) before computing distances");
  }
};

InitialPosterior posterior_from_sample(EndpointKind kind, std::span<const double> x) {
  const auto n = static_cast<long>(x.size());
  if (kind == EndpointKind::Binary) {
    const double y = std::accumulate(x.begin(), x.end(), 0.0);
    return Beta{y + 0.5, static_cast<double>(n) - y + 0.5};
  }
  if (kind != EndpointKind::Continuous)
    throw Error(Errc::UnsupportedEndpoint, "patient-level subsampling supports continuous or binary records");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return Normal{mean, ss / static_cast<double>(n) / static_cast<double>(n)};
}

}  // namespace

InitialPosterior initial_posterior(const DatasetSummary& s) { return std::visit(InitialPosteriorVisitor{}, s); }

InitialPosterior capped_initial_posterior(const DatasetSummary& s, long n_cap) {
  const long nk = sample_size(s);
  if (nk <= n_cap) return initial_posterior(s);
  const double scale = static_cast<double>(nk) / static_cast<double>(n_cap);
  if (const auto* b = std::get_if<BinarySummary>(&s)) {
    const double p = b->rate();
    const double cap = static_cast<double>(n_cap);
    return Beta{p * cap + 0.5, (1.0 - p) * cap + 0.5};
  }
  auto post = std::get<Normal>(initial_posterior(s));
  post.var *= scale;
  return post;
}

double kl_divergence(const Normal& p, const Normal& q) {
  const double d = p.mean - q.mean;
  return 0.5 * std::log(q.var / p.var) + (p.var + d * d) / (2.0 * q.var) - 0.5;
}

double kl_divergence(const Beta& p, const Beta& q) {
  const double a = p.alpha, b = p.beta, c = q.alpha, d = q.beta;
  return log_beta_fn(c, d) - log_beta_fn(a, b) + (a - c) * digamma(a) + (b - d) * digamma(b) +
         (c - a + d - b) * digamma(a + b);
}

double kl_divergence(const InitialPosterior& p, const InitialPosterior& q) {
  if (p.index() != q.index()) throw Error(Errc::VariantMismatch, "KL divergence between different families");
  return std::visit(
      [&q](const auto& pp) -> double {
        using T = std::decay_t<decltype(pp)>;
        return kl_divergence(pp, std::get<T>(q));
      },
      p);
}

double js_distance(const InitialPosterior& p, const InitialPosterior& q) {
  return 0.5 * (kl_divergence(p, q) + kl_divergence(q, p));
}

double js_distance_subsampled(const PatientLevel& current, const PatientLevel& historical, int repeats,
                              std::uint64_t seed) {
  const std::size_t n = current.values.size();
  if (historical.values.size() <= n)
    throw Error(Errc::NotApplicable, "subsampling applies only when the historical study is larger");
  if (current.kind != historical.kind) throw Error(Errc::VariantMismatch, "current and historical kinds differ");
  if (repeats < 1) throw Error(Errc::ConfigError, "subsampling needs at least one repeat");
  const InitialPosterior cur = posterior_from_sample(current.kind, current.values);
  std::vector<double> pool = historical.values;
  std::vector<double> draw(n);
  double total = 0.0;
  for (int r = 0; r < repeats; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    // partial Fisher-Yates: the first n slots become a uniform subsample without replacement
    std::vector<double> work = pool;
    for (std::size_t i = 0; i < n; ++i) {
      const auto span = work.size() - i;
      const auto j = i + static_cast<std::size_t>(rng.next_u64() % span);
      std::swap(work[i], work[j]);
      draw[i] = work[i];
    }
    total += js_distance(cur, posterior_from_sample(historical.kind, draw));
  }
  return total / static_cast<double>(repeats);
}

DistanceReport js_distances(const StudySet& studies, std::span<const std::optional<PatientLevel>> historical_records,
                            const std::optional<PatientLevel>& current_records, int repeats, std::uint64_t seed) {
  const auto& hist = studies.historical();
  const long n = sample_size(studies.current().data);
  const InitialPosterior cur = initial_posterior(studies.current().data);
  DistanceReport report;
  report.d.resize(static_cast<Eigen::Index>(hist.size()));
  report.subsampled.assign(hist.size(), false);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const long nk = sample_size(hist[k].data);
    double d;
    if (nk > n) {
      report.subsampled[k] = true;
      const bool have_records = k < historical_records.size() && historical_records[k].has_value() &&
                                current_records.has_value();
      if (have_records) {
        d = js_distance_subsampled(*current_records, *historical_records[k], repeats,
                                   derive_seed(seed, static_cast<std::uint64_t>(k)));
        report.repeats_used = repeats;
      } else {
        d = js_distance(cur, capped_initial_posterior(hist[k].data, n));
      }
    } else {
      d = js_distance(cur, initial_posterior(hist[k].data));
    }
    report.d[static_cast<Eigen::Index>(k)] = std::max(d, kDistanceFloor);
  }
  return report;
}

DistanceReport js_distances(const InitialPosterior& current, std::span<const InitialPosterior> historical) {
  DistanceReport report;
  report.d.resize(static_cast<Eigen::Index>(historical.size()));
  report.subsampled.assign(historical.size(), false);
  for (std::size_t k = 0; k < historical.size(); ++k)
    report.d[static_cast<Eigen::Index>(k)] = std::max(js_distance(current, historical[k]), kDistanceFloor);
  return report;
}

WeightVector js_weights(const Eigen::VectorXd& distances) {
  const Eigen::VectorXd inv = distances.cwiseMax(kDistanceFloor).cwiseInverse();
  return WeightVector::normalized(inv);
}

WeightVector js_weights(const DistanceReport& report) { return js_weights(report.d); }

}  // namespace uip
