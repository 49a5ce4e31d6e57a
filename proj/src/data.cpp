#include "uip/data.hpp"

#include <cmath>
#include <sstream>

#include "uip/error.hpp"
#include "uip/special.hpp"

namespace uip {

ContinuousSummary::ContinuousSummary(long n, double mean, double sd) : n_(n), mean_(mean), sd_(sd) {
  if (n < 2) throw Error(Errc::InvalidSummary, "continuous summary needs n >= 2");
  if (!std::isfinite(mean)) throw Error(Errc::InvalidSummary, "continuous summary mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw Error(Errc::InvalidSummary, "continuous summary needs finite sd > 0");
}

BinarySummary::BinarySummary(long n, long successes) : n_(n), successes_(successes) {
  if (n < 1) throw Error(Errc::InvalidSummary, "binary summary needs n >= 1");
  if (successes < 0 || successes > n) throw Error(Errc::InvalidSummary, "binary summary needs 0 <= successes <= n");
}

CoefficientSummary::CoefficientSummary(double estimate, double se, long n) : estimate_(estimate), se_(se), n_(n) {
  if (!std::isfinite(estimate)) throw Error(Errc::InvalidSummary, "coefficient estimate must be finite");
  if (!(se > 0.0) || !std::isfinite(se)) throw Error(Errc::InvalidSummary, "coefficient se must be finite and > 0");
  if (n < 2) throw Error(Errc::InvalidSummary, "coefficient summary needs n >= 2");
}

const char* to_string(EndpointKind kind) noexcept {
  switch (kind) {
    case EndpointKind::Continuous: return "continuous";
    case EndpointKind::Binary: return "binary";
    case EndpointKind::Coefficient: return "coefficient";
    case EndpointKind::TwoArm: return "two_arm";
  }
  return "unknown";
}

EndpointKind kind_of(const DatasetSummary& s) noexcept {
  return static_cast<EndpointKind>(s.index());
}

long sample_size(const DatasetSummary& s) noexcept {
  return std::visit([](const auto& v) -> long { return v.n(); }, s);
}

namespace {

bool compatible(EndpointKind current, EndpointKind hist) {
  if (current == hist) return true;
  return current == EndpointKind::TwoArm && hist == EndpointKind::Coefficient;
}

}  // namespace

StudySet::StudySet(LabeledSummary current, std::vector<LabeledSummary> historical)
    : current_(std::move(current)), historical_(std::move(historical)) {
  if (historical_.empty()) throw Error(Errc::InvalidSummary, "study set needs at least one historical study");
  for (const auto& h : historical_) {
    if (!compatible(kind(), kind_of(h.data))) {
      std::ostringstream msg;
      msg << "historical study '" << h.label << "' is " << to_string(kind_of(h.data)) << " but the current study is "
          << to_string(kind());
      throw Error(Errc::InvalidSummary, msg.str());
    }
  }
}

double se_from_ci(double lower, double upper, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::BadLevel, "confidence level must lie in (0, 1)");
  if (!(upper > lower)) throw Error(Errc::NonPositiveWidth, "confidence interval upper bound must exceed the lower");
  return (upper - lower) / (2.0 * normal_quantile(0.5 * (1.0 + level)));
}

double mle_variance(const ContinuousSummary& s) {
  const double n = static_cast<double>(s.n());
  return s.sd() * s.sd() * (n - 1.0) / n;
}

double corrected_rate(const BinarySummary& b) {
  if (b.successes() == 0 || b.successes() == b.n())
    return (static_cast<double>(b.successes()) + 0.5) / (static_cast<double>(b.n()) + 1.0);
  return b.rate();
}

}  // namespace uip
