#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace viewfuse {

enum class ErrorCode {
  // ingestion
  ParseError,
  MissingViewpoint,
  EmptyPointCloud,
  InvalidPointCloud,
  // confidence
  EmptyTokenList,
  NonFiniteLogprob,
  NegativeRaw,
  // clustering / scoring
  DimensionMismatch,
  ZeroNormVector,
  EmptyInput,
  InvalidEps,
  LengthMismatch,
  EmptyCandidates,
  OutOfRangeArgument,
  // bandit
  NoArms,
  InvalidArm,
  UnknownStrategy,
  // synthesis
  MissingFrontOrBack,
  MissingView,
  EmptyText,
  // gating
  NoRootInUnitInterval,
  DegenerateParams,
  // providers
  ProviderUnavailable,
  MalformedProviderResponse,
  MissingLogprobs,
  DimensionContractViolation,
  CacheCorruption,
  CacheDirUnwritable,
  // pipeline
  ConfigError,
  NegativePrice,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; `what()` is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Transport-level provider failure; the HTTP adapter retries only these.
class ProviderUnavailable : public Error {
 public:
  explicit ProviderUnavailable(const std::string& detail)
      : Error(ErrorCode::ProviderUnavailable, detail) {}
};

}  // namespace viewfuse
