#include "rebuttal/errors.hpp"

namespace rebuttal {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kEmptyBlock: return "EmptyBlock";
    case ErrorKind::kMalformedSequence: return "MalformedSequence";
    case ErrorKind::kUnknownCategory: return "UnknownCategory";
    case ErrorKind::kOutOfRange: return "OutOfRange";
    case ErrorKind::kSchemaMismatch: return "SchemaMismatch";
    case ErrorKind::kProviderError: return "ProviderError";
    case ErrorKind::kTimeout: return "Timeout";
    case ErrorKind::kExtractionParseError: return "ExtractionParseError";
    case ErrorKind::kJudgeParseError: return "JudgeParseError";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kGroupTooSmall: return "GroupTooSmall";
    case ErrorKind::kEmptyGroup: return "EmptyGroup";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kQuotaUnsatisfiable: return "QuotaUnsatisfiable";
    case ErrorKind::kDuplicateRun: return "DuplicateRun";
    case ErrorKind::kMissingRun: return "MissingRun";
    case ErrorKind::kPrecondition: return "Precondition";
    case ErrorKind::kUsage: return "Usage";
  }
  return "Unknown";
}

}  // namespace rebuttal
