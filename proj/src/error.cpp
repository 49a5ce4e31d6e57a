#include "uip/error.hpp"

namespace uip {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSummary: return "InvalidSummary";
    case Errc::NonPositiveWidth: return "NonPositiveWidth";
    case Errc::BadLevel: return "BadLevel";
    case Errc::DegeneratePrior: return "DegeneratePrior";
    case Errc::InvalidPriorMoments: return "InvalidPriorMoments";
    case Errc::VariantMismatch: return "VariantMismatch";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::NeedsPatientLevel: return "NeedsPatientLevel";
    case Errc::ConfigError: return "ConfigError";
    case Errc::EmptyChain: return "EmptyChain";
    case Errc::AllZeroPower: return "AllZeroPower";
    case Errc::UnsupportedEndpoint: return "UnsupportedEndpoint";
    case Errc::GridExhausted: return "GridExhausted";
    case Errc::Uncalibratable: return "Uncalibratable";
  }
  return "Unknown";
}

}  // namespace uip
