#include "tbw/error.hpp"

#include <fmt/format.h>

namespace tbw {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::BadId: return "BadId";
    case ErrorCode::BadHead: return "BadHead";
    case ErrorCode::UnsupportedAnnotation: return "UnsupportedAnnotation";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::TooFewSentences: return "TooFewSentences";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::UntrainedModel: return "UntrainedModel";
    case ErrorCode::NonTreeInput: return "NonTreeInput";
    case ErrorCode::AlignmentMismatch: return "AlignmentMismatch";
    case ErrorCode::MissingCorpus: return "MissingCorpus";
    case ErrorCode::BadModelFile: return "BadModelFile";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::size_t line) {
  if (line > 0) return fmt::format("{} (line {}): {}", error_code_name(code), line, message);
  return fmt::format("{}: {}", error_code_name(code), message);
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace tbw
