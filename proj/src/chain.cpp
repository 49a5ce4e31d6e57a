#include "uip/chain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "uip/error.hpp"

namespace uip {

void ChainConfig::validate() const {
  if (iterations < 1000) throw Error(Errc::ConfigError, "chain iterations must be >= 1000");
  if (burn_in < 0 || burn_in >= iterations) throw Error(Errc::ConfigError, "burn_in must lie in [0, iterations)");
  if (adapt_window < 1) throw Error(Errc::ConfigError, "adapt_window must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0) || !(target_accept_multi > 0.0 && target_accept_multi < 1.0))
    throw Error(Errc::ConfigError, "target acceptance rates must lie in (0, 1)");
}

Chain::Chain(std::vector<std::string> names, ChainConfig config)
    : names_(std::move(names)), columns_(names_.size()), config_(config) {}

void Chain::push(std::span<const double> row) {
  for (std::size_t j = 0; j < columns_.size(); ++j) columns_[j].push_back(row[j]);
}

void Chain::reserve(std::size_t rows) {
  for (auto& c : columns_) c.reserve(rows);
}

bool Chain::has(std::string_view name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Chain::draws(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(Errc::EmptyChain, "chain has no parameter '" + std::string(name) + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

void Chain::write_csv(std::ostream& out) const {
  for (std::size_t j = 0; j < names_.size(); ++j) out << (j ? "," : "") << names_[j];
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, columns_[j][i], std::chars_format::general, 17);
      if (j) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(Errc::EmptyChain, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

PosteriorSummary posterior_summary(std::span<const double> draws, double level) {
  if (draws.empty()) throw Error(Errc::EmptyChain, "posterior summary of an empty chain");
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::BadLevel, "credible level must lie in (0, 1)");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  PosteriorSummary s;
  s.estimate = mean_of(draws);
  double ss = 0.0;
  for (double v : draws) ss += (v - s.estimate) * (v - s.estimate);
  s.sd = draws.size() > 1 ? std::sqrt(ss / static_cast<double>(draws.size() - 1)) : 0.0;
  s.lower = sorted_quantile(sorted, 0.5 * (1.0 - level));
  s.upper = sorted_quantile(sorted, 0.5 * (1.0 + level));
  return s;
}

double critical_level(std::span<const double> sorted, double value) {
  if (sorted.empty()) throw Error(Errc::EmptyChain, "critical level of an empty sample");
  if (value < sorted.front() || value > sorted.back()) return 2.0;
  // outside(level) is monotone: true for small levels, false once the interval covers value
  const auto outside = [&](double level) {
    return value < sorted_quantile(sorted, 0.5 * (1.0 - level)) ||
           value > sorted_quantile(sorted, 0.5 * (1.0 + level));
  };
  if (!outside(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (outside(mid) ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace uip
