#pragma once

#include <string>
#include <variant>
#include <vector>

namespace uip {

/// Sufficient statistics of a normal sample. `sd` is the conventional sample SD (divisor n-1).
class ContinuousSummary {
 public:
  ContinuousSummary(long n, double mean, double sd);

  long n() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double sd() const noexcept { return sd_; }

 private:
  long n_;
  double mean_;
  double sd_;
};

class BinarySummary {
 public:
  BinarySummary(long n, long successes);

  long n() const noexcept { return n_; }
  long successes() const noexcept { return successes_; }
  double rate() const noexcept { return static_cast<double>(successes_) / static_cast<double>(n_); }

 private:
  long n_;
  long successes_;
};

/// A published regression coefficient: point estimate, its standard error, and the study size.
class CoefficientSummary {
 public:
  CoefficientSummary(double estimate, double se, long n);

  double estimate() const noexcept { return estimate_; }
  double se() const noexcept { return se_; }
  long n() const noexcept { return n_; }

 private:
  double estimate_;
  double se_;
  long n_;
};

/// Group statistics of a two-arm trial, enough for Y ~ b0 + b1 * X with X the treatment indicator.
struct TwoArmGroupStats {
  ContinuousSummary treatment;
  ContinuousSummary control;

  long n() const noexcept { return treatment.n() + control.n(); }
};

enum class EndpointKind { Continuous, Binary, Coefficient, TwoArm };

const char* to_string(EndpointKind kind) noexcept;

using DatasetSummary = std::variant<ContinuousSummary, BinarySummary, CoefficientSummary, TwoArmGroupStats>;

EndpointKind kind_of(const DatasetSummary& s) noexcept;
long sample_size(const DatasetSummary& s) noexcept;

struct LabeledSummary {
  std::string label;
  DatasetSummary data;
};

/// The current study plus K >= 1 historical studies of a compatible endpoint kind.
/// A two-arm current study may be paired with coefficient or two-arm history (regression borrowing).
class StudySet {
 public:
  StudySet(LabeledSummary current, std::vector<LabeledSummary> historical);

  const LabeledSummary& current() const noexcept { return current_; }
  const std::vector<LabeledSummary>& historical() const noexcept { return historical_; }
  std::size_t size() const noexcept { return historical_.size(); }
  EndpointKind kind() const noexcept { return kind_of(current_.data); }

  template <class T>
  std::vector<T> historical_as() const {
    std::vector<T> out;
    out.reserve(historical_.size());
    for (const auto& h : historical_) out.push_back(std::get<T>(h.data));
    return out;
  }

 private:
  LabeledSummary current_;
  std::vector<LabeledSummary> historical_;
};

/// Standard error recovered from a symmetric confidence interval.
double se_from_ci(double lower, double upper, double level);

/// sd^2 * (n-1)/n.
double mle_variance(const ContinuousSummary& s);

/// Rate with a (y + 0.5)/(n + 1) correction applied only at y in {0, n}.
double corrected_rate(const BinarySummary& b);

/// Total sum of squares about the mean, (n-1) * sd^2.
inline double sum_of_squares(const ContinuousSummary& s) {
  return static_cast<double>(s.n() - 1) * s.sd() * s.sd();
}

}  // namespace uip
