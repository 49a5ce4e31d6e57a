#pragma once

// Reference computations used only by the tests. None of these call into the library's numerics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace oracle {

/// Composite Simpson rule with `nodes` (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int nodes = 10000) {
  const double h = (b - a) / nodes;
  double s = f(a) + f(b);
  for (int i = 1; i < nodes; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double normal_logpdf(double x, double m, double v) {
  return -0.5 * std::log(2.0 * std::numbers::pi * v) - (x - m) * (x - m) / (2.0 * v);
}

inline double beta_logpdf(double x, double a, double b) {
  return (a - 1) * std::log(x) + (b - 1) * std::log(1 - x) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// KL(N(m1, v1) || N(m2, v2)) by quadrature over m1 +- 12 sd.
inline double kl_normal_quadrature(double m1, double v1, double m2, double v2) {
  const double s = std::sqrt(v1);
  return simpson(
      [&](double x) {
        const double lp = normal_logpdf(x, m1, v1);
        return std::exp(lp) * (lp - normal_logpdf(x, m2, v2));
      },
      m1 - 12 * s, m1 + 12 * s);
}

/// KL(Beta(a1, b1) || Beta(a2, b2)) by quadrature after x = (1 + tanh t) / 2, which clusters nodes at 0 and 1.
inline double kl_beta_quadrature(double a1, double b1, double a2, double b2) {
  const auto integrand = [&](double t) {
    const double x = 0.5 * (1.0 + std::tanh(t));
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double jac = 0.5 / (std::cosh(t) * std::cosh(t));
    const double lp = beta_logpdf(x, a1, b1);
    return std::exp(lp) * (lp - beta_logpdf(x, a2, b2)) * jac;
  };
  return simpson(integrand, -20.0, 20.0);
}

inline double normal_cdf(double x, double m, double v) { return 0.5 * std::erfc(-(x - m) / std::sqrt(2.0 * v)); }

inline double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Normal-mean posterior with known variance s2 and prior N(m0, v0), from n observations with mean ybar.
struct NormalPosterior {
  double mean;
  double var;
};
inline NormalPosterior conjugate_normal(double m0, double v0, double ybar, double s2, long n) {
  const double prec = 1.0 / v0 + n / s2;
  return {(m0 / v0 + n * ybar / s2) / prec, 1.0 / prec};
}

/// Bayesian linear regression Y = b0 + b1 X with known sigma^2: prior N(0, pv I), X the treatment indicator.
/// Returns the posterior mean and variance of b1.
inline NormalPosterior two_arm_slope_posterior(long n1, double ybar1, long n0, double ybar0, double s2, double pv) {
  const double n = n0 + n1;
  // Precision matrix [[n, n1], [n1, n1]] / s2 + I / pv.
  const double a = n / s2 + 1 / pv, b = n1 / s2, d = n1 / s2 + 1 / pv;
  const double det = a * d - b * b;
  const double r0 = (n0 * ybar0 + n1 * ybar1) / s2, r1 = n1 * ybar1 / s2;
  return {(-b * r0 + a * r1) / det, a / det};
}

}  // namespace oracle
