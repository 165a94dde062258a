#include "viewfuse/error.hpp"

namespace viewfuse {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingViewpoint: return "MissingViewpoint";
    case ErrorCode::EmptyPointCloud: return "EmptyPointCloud";
    case ErrorCode::InvalidPointCloud: return "InvalidPointCloud";
    case ErrorCode::EmptyTokenList: return "EmptyTokenList";
    case ErrorCode::NonFiniteLogprob: return "NonFiniteLogprob";
    case ErrorCode::NegativeRaw: return "NegativeRaw";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNormVector: return "ZeroNormVector";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidEps: return "InvalidEps";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::OutOfRangeArgument: return "OutOfRangeArgument";
    case ErrorCode::NoArms: return "NoArms";
    case ErrorCode::InvalidArm: return "InvalidArm";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::MissingFrontOrBack: return "MissingFrontOrBack";
    case ErrorCode::MissingView: return "MissingView";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::NoRootInUnitInterval: return "NoRootInUnitInterval";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::MalformedProviderResponse: return "MalformedProviderResponse";
    case ErrorCode::MissingLogprobs: return "MissingLogprobs";
    case ErrorCode::DimensionContractViolation: return "DimensionContractViolation";
    case ErrorCode::CacheCorruption: return "CacheCorruption";
    case ErrorCode::CacheDirUnwritable: return "CacheDirUnwritable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NegativePrice: return "NegativePrice";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace viewfuse
