#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace uip {

/// SplitMix64 finalizer; used to derive independent child seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// seed = master xor hash(index); stable across platforms and thread counts.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return master ^ mix_seed(index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  double normal() { return normal_(engine_); }
  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
  }
  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }
  /// InvGamma(shape, scale): scale / Gamma(shape, 1).
  double inv_gamma(double shape, double scale) { return scale / gamma(shape); }
  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }
  long binomial(long n, double p) { return std::binomial_distribution<long>(n, p)(engine_); }
  std::uint64_t next_u64() { return engine_(); }

  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha) {
    Eigen::VectorXd g(alpha.size());
    for (Eigen::Index k = 0; k < alpha.size(); ++k) g[k] = gamma(alpha[k]);
    return g / g.sum();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace uip
