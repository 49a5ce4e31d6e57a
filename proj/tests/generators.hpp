#pragma once

// Hand-rolled generators for property tests. Seeded per property so failures replay.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "uip/core.hpp"
#include "uip/data.hpp"

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng_); }

  /// Point on the open simplex with entries bounded away from zero.
  Eigen::VectorXd simplex(Eigen::Index k) {
    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i) w[i] = uniform(0.05, 1.0);
    return w / w.sum();
  }

  uip::ContinuousSummary continuous(long n_lo = 10, long n_hi = 300) {
    return uip::ContinuousSummary(integer(n_lo, n_hi), uniform(-3.0, 3.0), uniform(0.3, 4.0));
  }

  uip::BinarySummary binary(long n_lo = 10, long n_hi = 300) {
    const long n = integer(n_lo, n_hi);
    return uip::BinarySummary(n, integer(1, n - 1));
  }

  std::vector<uip::ContinuousSummary> continuous_set(std::size_t k) {
    std::vector<uip::ContinuousSummary> s;
    for (std::size_t i = 0; i < k; ++i) s.push_back(continuous());
    return s;
  }

  std::vector<uip::BinarySummary> binary_set(std::size_t k) {
    std::vector<uip::BinarySummary> s;
    for (std::size_t i = 0; i < k; ++i) s.push_back(binary());
    return s;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gen
