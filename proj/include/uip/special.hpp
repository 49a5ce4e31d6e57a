#pragma once

#include <cmath>
#include <numbers>

namespace uip {

/// Digamma function for x > 0 (recurrence up to x >= 10, then the asymptotic series).
double digamma(double x);

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Inverse of the standard normal CDF (Wichura's AS 241, ~1e-16 relative accuracy).
double normal_quantile(double p);

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

inline double log_beta_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

}  // namespace uip
