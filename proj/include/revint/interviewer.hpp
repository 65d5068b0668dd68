#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revint/gateway.hpp"
#include "revint/prompt_template.hpp"

namespace revint {

inline constexpr std::string_view kWaitForResponse = "[Wait_for_Response]";
inline constexpr std::string_view kEndOfInterview = "[End_of_Interview]";
inline constexpr std::string_view kInterviewerPrefix = "Interviewer:";
inline constexpr std::string_view kIntervieweePrefix = "Interviewee:";

struct ProductRef {
  std::string title;
  std::string category;
  std::string external_id;

  bool operator==(const ProductRef&) const = default;
};

enum class Policy { adaptive, baseline };
std::string_view to_string(Policy p) noexcept;
Policy policy_from_string(std::string_view s);

struct InterviewConfig {
  int min_questions = 8;
  int max_turns = 15;
  double temperature = kInterviewTemperature;
  int max_output_tokens = kDefaultMaxOutputTokens;
  Policy policy = Policy::adaptive;

  void validate() const;  // throws InvalidConfig
  bool operator==(const InterviewConfig&) const = default;
};

enum class Speaker { interviewer, interviewee };
std::string_view to_string(Speaker s) noexcept;
Speaker speaker_from_string(std::string_view s);

struct DialogueTurn {
  int index = 0;
  Speaker speaker = Speaker::interviewer;
  std::string text;
  bool awaits_response = false;
  bool ends_interview = false;
  std::string raw;  // interviewer turns only
  std::string timestamp;

  bool operator==(const DialogueTurn&) const = default;
};

enum class SessionStatus { active, completed, hard_stopped, aborted };
std::string_view to_string(SessionStatus s) noexcept;
SessionStatus status_from_string(std::string_view s);

struct InterviewSession {
  std::string id;
  ProductRef product;
  InterviewConfig config;
  std::vector<DialogueTurn> turns;
  SessionStatus status = SessionStatus::active;
  int question_count = 0;
  /// Set when the model ended the interview before min_questions.
  bool protocol_violation = false;
  std::string created_at;

  bool terminal() const noexcept {
    return status == SessionStatus::completed || status == SessionStatus::hard_stopped;
  }
  const DialogueTurn* last_interviewer_turn() const noexcept;

  bool operator==(const InterviewSession&) const = default;
};

/// Checks every InterviewSession invariant; returns a description of the
/// first violation, or nullopt.
std::optional<std::string> check_invariants(const InterviewSession& session);

// --- prompt ----------------------------------------------------------------

const PromptTemplate& interview_prompt_template();
std::string build_interview_prompt(const ProductRef& product, const InterviewConfig& config);

// --- utterance parsing ------------------------------------------------------

struct ParsedUtterance {
  std::string text;
  bool awaits_response = false;
  bool ends_interview = false;
  bool had_prefix = false;
};

/// Strips the "Interviewer:" prefix and trailing control tokens, setting the
/// corresponding flags. A missing prefix is accepted with a warning.
ParsedUtterance parse_interviewer_utterance(std::string_view raw);

// --- baseline policy --------------------------------------------------------

inline constexpr std::size_t kBaselineQuestionCount = 9;
std::string_view baseline_question(int index);

// --- turn control -------------------------------------------------------------

struct StartResult {
  InterviewSession session;
  DialogueTurn first_turn;
};

/// Creates a new active session holding the first interviewer turn.
StartResult start_interview(const ProductRef& product, const InterviewConfig& config,
                            const Gateway& gateway);

struct AdvanceResult {
  std::optional<DialogueTurn> next_turn;  // absent when the session hard-stopped or completed
  bool terminal = false;
};

/// Appends the interviewee's answer and obtains the next interviewer turn.
/// Strong guarantee: on any exception `session` is unchanged.
AdvanceResult advance_interview(InterviewSession& session, std::string_view user_message,
                                const Gateway& gateway);

/// Messages sent to the backend for the next adaptive turn: the rendered
/// prompt as system message followed by the full transcript.
std::vector<ChatMessage> interview_messages(const InterviewSession& session);

}  // namespace revint
