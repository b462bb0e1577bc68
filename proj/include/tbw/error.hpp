#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tbw {

enum class ErrorCode {
  MalformedLine,
  BadId,
  BadHead,
  UnsupportedAnnotation,
  EmptyCorpus,
  TooFewSentences,
  InvalidSplit,
  EmptyTrainingSet,
  EmptyTestSet,
  UntrainedModel,
  NonTreeInput,
  AlignmentMismatch,
  MissingCorpus,
  BadModelFile,
  IOError,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this type. Format errors carry
// the 1-based input line number (0 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace tbw
