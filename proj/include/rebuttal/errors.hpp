#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rebuttal {

enum class ErrorKind {
  kEmptyBlock,
  kMalformedSequence,
  kUnknownCategory,
  kOutOfRange,
  kSchemaMismatch,
  kProviderError,
  kTimeout,
  kExtractionParseError,
  kJudgeParseError,
  kDimensionMismatch,
  kEmptyCorpus,
  kGroupTooSmall,
  kEmptyGroup,
  kLengthMismatch,
  kDegenerateInput,
  kQuotaUnsatisfiable,
  kDuplicateRun,
  kMissingRun,
  kPrecondition,
  kUsage,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library. `stage` is filled in by the TSR
// pipeline when an error crosses a stage boundary; `raw_outputs` keeps the
// provider text that failed to parse, for audit.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::vector<std::string>& raw_outputs() const noexcept {
    return raw_outputs_;
  }

  Error& with_stage(std::string stage) {
    stage_ = std::move(stage);
    return *this;
  }
  Error& with_raw_outputs(std::vector<std::string> raw) {
    raw_outputs_ = std::move(raw);
    return *this;
  }

 private:
  ErrorKind kind_;
  std::string stage_;
  std::vector<std::string> raw_outputs_;
};

// Provider transport failure that the gateway may retry (HTTP 429/5xx,
// connection reset). Backends throw this; callers of the gateway never see it.
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public TransientError {
 public:
  using TransientError::TransientError;
};

}  // namespace rebuttal
