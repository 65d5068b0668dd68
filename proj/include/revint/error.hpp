#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revint {

enum class ErrorCode {
  PreconditionViolated,
  // gateway
  BackendUnavailable,
  ScriptExhausted,
  Timeout,
  ReplayMiss,
  StorageFailure,
  CassetteParseError,
  // interviewer
  EmptyProductTitle,
  EmptyUtterance,
  InvalidConfig,
  SessionNotActive,
  EmptyUserMessage,
  IndexOutOfRange,
  // review generator
  EmptyDialogue,
  SessionNotTerminal,
  EmptyCompletion,
  // rating predictor
  InvalidExemplarSet,
  NoRatingFound,
  RatingOutOfRange,
  // evaluation
  EmptySample,
  NoJudgments,
  NoResponses,
  EmptyCell,
  // input files and service
  InputFormat,
  NotFound,
  NotFinalized,
  InvalidLikertLabel,
  InvalidFeedback,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// the HTTP layer and the CLI can map it to a status or exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Transient backend failures are retried once by the gateway.
  bool transient() const noexcept {
    return code_ == ErrorCode::BackendUnavailable || code_ == ErrorCode::Timeout;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace revint
