#include "revint/error.hpp"

namespace revint {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::CassetteParseError: return "CassetteParseError";
    case ErrorCode::EmptyProductTitle: return "EmptyProductTitle";
    case ErrorCode::EmptyUtterance: return "EmptyUtterance";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SessionNotActive: return "SessionNotActive";
    case ErrorCode::EmptyUserMessage: return "EmptyUserMessage";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyDialogue: return "EmptyDialogue";
    case ErrorCode::SessionNotTerminal: return "SessionNotTerminal";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::InvalidExemplarSet: return "InvalidExemplarSet";
    case ErrorCode::NoRatingFound: return "NoRatingFound";
    case ErrorCode::RatingOutOfRange: return "RatingOutOfRange";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NoJudgments: return "NoJudgments";
    case ErrorCode::NoResponses: return "NoResponses";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::InputFormat: return "InputFormat";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotFinalized: return "NotFinalized";
    case ErrorCode::InvalidLikertLabel: return "InvalidLikertLabel";
    case ErrorCode::InvalidFeedback: return "InvalidFeedback";
  }
  return "Unknown";
}

}  // namespace revint
