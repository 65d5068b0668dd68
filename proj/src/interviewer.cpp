#include "revint/interviewer.hpp"

#include <array>

#include "revint/clock.hpp"
#include "revint/error.hpp"
#include "revint/log.hpp"
#include "revint/text.hpp"

namespace revint {

std::string_view to_string(Policy p) noexcept {
  return p == Policy::baseline ? "baseline" : "adaptive";
}

Policy policy_from_string(std::string_view s) {
  if (s == "adaptive") return Policy::adaptive;
  if (s == "baseline") return Policy::baseline;
  fail(ErrorCode::InvalidConfig, "unknown policy '" + std::string(s) + "'");
}

std::string_view to_string(Speaker s) noexcept {
  return s == Speaker::interviewer ? "interviewer" : "interviewee";
}

Speaker speaker_from_string(std::string_view s) {
  if (s == "interviewer") return Speaker::interviewer;
  if (s == "interviewee") return Speaker::interviewee;
  fail(ErrorCode::InputFormat, "unknown speaker '" + std::string(s) + "'");
}

std::string_view to_string(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::active: return "active";
    case SessionStatus::completed: return "completed";
    case SessionStatus::hard_stopped: return "hard_stopped";
    case SessionStatus::aborted: return "aborted";
  }
  return "active";
}

SessionStatus status_from_string(std::string_view s) {
  if (s == "active") return SessionStatus::active;
  if (s == "completed") return SessionStatus::completed;
  if (s == "hard_stopped") return SessionStatus::hard_stopped;
  if (s == "aborted") return SessionStatus::aborted;
  fail(ErrorCode::InputFormat, "unknown session status '" + std::string(s) + "'");
}

void InterviewConfig::validate() const {
  if (min_questions <= 0) fail(ErrorCode::InvalidConfig, "min_questions must be positive");
  if (max_turns <= 0) fail(ErrorCode::InvalidConfig, "max_turns must be positive");
  if (min_questions > max_turns)
    fail(ErrorCode::InvalidConfig, "min_questions (" + std::to_string(min_questions) +
                                       ") exceeds max_turns (" + std::to_string(max_turns) + ")");
  if (!(temperature >= 0.0 && temperature <= 2.0))
    fail(ErrorCode::InvalidConfig, "temperature must lie in [0, 2]");
  if (max_output_tokens <= 0) fail(ErrorCode::InvalidConfig, "max_output_tokens must be positive");
}

const DialogueTurn* InterviewSession::last_interviewer_turn() const noexcept {
  for (auto it = turns.rbegin(); it != turns.rend(); ++it)
    if (it->speaker == Speaker::interviewer) return &*it;
  return nullptr;
}

std::optional<std::string> check_invariants(const InterviewSession& s) {
  if (s.product.title.empty()) return "product title is empty";
  if (s.config.min_questions > s.config.max_turns) return "min_questions exceeds max_turns";
  int interviewer_turns = 0;
  for (std::size_t i = 0; i < s.turns.size(); ++i) {
    const auto& t = s.turns[i];
    if (t.index != static_cast<int>(i)) return "turn indices are not consecutive";
    const auto expected = i % 2 == 0 ? Speaker::interviewer : Speaker::interviewee;
    if (t.speaker != expected) return "speakers do not alternate starting with the interviewer";
    if (t.text.empty()) return "turn " + std::to_string(i) + " has empty text";
    if (t.ends_interview && t.speaker != Speaker::interviewer)
      return "ends_interview set on an interviewee turn";
    if (t.speaker == Speaker::interviewer) ++interviewer_turns;
  }
  if (s.question_count != interviewer_turns) return "question_count differs from interviewer turns";
  if (s.question_count > s.config.max_turns) return "question_count exceeds max_turns";
  if (s.status == SessionStatus::completed) {
    const auto* last = s.last_interviewer_turn();
    if (!last || !last->ends_interview)
      return "completed session whose last interviewer turn does not end the interview";
  }
  if (s.status == SessionStatus::hard_stopped && s.question_count != s.config.max_turns)
    return "hard-stopped session below max_turns";
  return std::nullopt;
}

// --- prompt ------------------------------------------------------------------

const PromptTemplate& interview_prompt_template() {
  static const PromptTemplate tmpl(
      "Your role is \"interviewer\" and my role is \"interviewee\".\n"
      "About the product I am going to present, please elicit my impressions and opinions from "
      "me when I have touched it.\n"
      "\n"
      "Note the following statements.\n"
      "1. The interviewer elicits the interviewee's satisfaction and dissatisfaction (the "
      "positive and negative points) with the product in a well-balanced and detailed.\n"
      "2. In response to the interviewee's response, the interviewer asks more in-depth "
      "questions about the aspect or elicits feedback about other aspects of the product.\n"
      "3. Be sure to attach the name of your role at the beginning of your utterance. Since "
      "your role is \"interviewer\", your generation should begin with \"Interviewer:\".\n"
      "4. Don't generate interviewee's utterances.\n"
      "5. Add \"[Wait_for_Response]\" at the end of your utterance and wait for my response.\n"
      "6. You must ask at least [MIN_QUESTION] questions. In other words, the dialogue must "
      "continue for [MIN_QUESTION] or more turns.\n"
      "7. Having fulfilled the 6th statement, you can terminate the interview at your "
      "discretion. However, the interview must be completed within [MAX_QUESTION] turns.\n"
      "8. When you terminate the intervew, add \"[End_of_Interview]\" at the end of your "
      "utterance.\n"
      "Now, please elicit my impressions and opinions about the following product from me.\n"
      "[PRODUCT_NAME]",
      {"PRODUCT_NAME", "MIN_QUESTION", "MAX_QUESTION"});
  return tmpl;
}

std::string build_interview_prompt(const ProductRef& product, const InterviewConfig& config) {
  if (text::is_blank(product.title)) fail(ErrorCode::EmptyProductTitle, "product title is empty");
  config.validate();
  return interview_prompt_template().render({
      {"PRODUCT_NAME", product.title},
      {"MIN_QUESTION", std::to_string(config.min_questions)},
      {"MAX_QUESTION", std::to_string(config.max_turns)},
  });
}

// --- parsing -------------------------------------------------------------------

namespace {

// Removes every occurrence of `token` from `line`; returns whether any was found.
bool erase_all(std::string& line, std::string_view token) {
  bool found = false;
  for (auto pos = line.find(token); pos != std::string::npos; pos = line.find(token, pos)) {
    line.erase(pos, token.size());
    found = true;
  }
  return found;
}

}  // namespace

ParsedUtterance parse_interviewer_utterance(std::string_view raw) {
  ParsedUtterance out;
  std::string_view body = text::trim(raw);
  if (body.empty()) fail(ErrorCode::EmptyUtterance, "interviewer utterance is empty");

  if (body.substr(0, kInterviewerPrefix.size()) == kInterviewerPrefix) {
    body.remove_prefix(kInterviewerPrefix.size());
    out.had_prefix = true;
  }

  std::vector<std::string> lines;
  for (auto line : text::split_lines(body)) lines.emplace_back(line);
  while (!lines.empty() && text::is_blank(lines.back())) lines.pop_back();

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool final_line = i + 1 == lines.size();
    const bool wait = erase_all(lines[i], kWaitForResponse);
    const bool end = erase_all(lines[i], kEndOfInterview);
    if (final_line) {
      out.awaits_response = wait;
      out.ends_interview = end;
    }
  }
  // drop whitespace left behind by removed tokens
  for (auto& line : lines) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
  }
  out.text = std::string(text::trim(text::join(lines, "\n")));
  if (out.text.empty())
    fail(ErrorCode::EmptyUtterance, "nothing left after removing prefix and control tokens");
  if (!out.had_prefix) log::warn("interviewer utterance lacks the \"Interviewer:\" prefix");
  return out;
}

// --- baseline --------------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, kBaselineQuestionCount> kBaselineQuestions = {
    "First, could you tell me about the features and functions of this product? What kind of "
    "product is this?",
    "What made you decide to purchase this product?",
    "If you have any points that you like or are satisfied with this product, please tell me in "
    "detail.",
    "What are the advantages of this product compared to other products?",
    "If you have any dissatisfaction with this product or areas for improvement for this "
    "product, please tell me in detail.",
    "What are the disadvantages of this product compared to other products?",
    "Who would this product be suitable for?",
    "Is this product worth the price? Also, why do you think so?",
    "Finally, do you have any requests or impressions about the product?",
};
}  // namespace

std::string_view baseline_question(int index) {
  if (index < 0 || index >= static_cast<int>(kBaselineQuestions.size()))
    fail(ErrorCode::IndexOutOfRange,
         "baseline question index " + std::to_string(index) + " outside [0, 8]");
  return kBaselineQuestions[static_cast<std::size_t>(index)];
}

// --- turn control ----------------------------------------------------------------

std::vector<ChatMessage> interview_messages(const InterviewSession& session) {
  std::vector<ChatMessage> messages;
  messages.reserve(session.turns.size() + 1);
  messages.push_back({Role::system, build_interview_prompt(session.product, session.config)});
  for (const auto& turn : session.turns) {
    if (turn.speaker == Speaker::interviewer)
      messages.push_back({Role::assistant, turn.raw.empty() ? turn.text : turn.raw});
    else
      messages.push_back({Role::user, turn.text});
  }
  return messages;
}

namespace {

DialogueTurn next_interviewer_turn(const InterviewSession& session, const Gateway& gateway) {
  DialogueTurn turn;
  turn.index = static_cast<int>(session.turns.size());
  turn.speaker = Speaker::interviewer;
  if (session.config.policy == Policy::baseline) {
    turn.text = std::string(baseline_question(session.question_count));
    turn.raw = turn.text;
    turn.awaits_response = true;
    turn.ends_interview = session.question_count + 1 == static_cast<int>(kBaselineQuestionCount);
  } else {
    const auto messages = interview_messages(session);
    const GenerationParams params{session.config.temperature, session.config.max_output_tokens};
    turn.raw = gateway.complete_chat(messages, params);
    auto parsed = parse_interviewer_utterance(turn.raw);
    turn.text = std::move(parsed.text);
    turn.awaits_response = parsed.awaits_response;
    turn.ends_interview = parsed.ends_interview;
  }
  turn.timestamp = now_rfc3339();
  return turn;
}

void apply_interviewer_turn(InterviewSession& session, DialogueTurn turn) {
  const bool ends = turn.ends_interview;
  session.turns.push_back(std::move(turn));
  ++session.question_count;
  if (session.config.policy == Policy::adaptive && ends) {
    session.status = SessionStatus::completed;
    if (session.question_count < session.config.min_questions) {
      session.protocol_violation = true;
      log::warn("session " + session.id + ": interview ended after " +
                std::to_string(session.question_count) + " questions, below the minimum of " +
                std::to_string(session.config.min_questions));
    }
  }
}

}  // namespace

StartResult start_interview(const ProductRef& product, const InterviewConfig& config,
                            const Gateway& gateway) {
  if (text::is_blank(product.title)) fail(ErrorCode::EmptyProductTitle, "product title is empty");
  config.validate();

  InterviewSession session;
  session.id = new_id();
  session.product = product;
  session.config = config;
  session.created_at = now_rfc3339();

  auto turn = next_interviewer_turn(session, gateway);
  apply_interviewer_turn(session, turn);
  return {std::move(session), std::move(turn)};
}

AdvanceResult advance_interview(InterviewSession& session, std::string_view user_message,
                                const Gateway& gateway) {
  if (session.status != SessionStatus::active)
    fail(ErrorCode::SessionNotActive,
         "session " + session.id + " is " + std::string(to_string(session.status)));
  const auto answer = text::trim(user_message);
  if (answer.empty()) fail(ErrorCode::EmptyUserMessage, "user message is empty");

  InterviewSession next = session;
  DialogueTurn reply;
  reply.index = static_cast<int>(next.turns.size());
  reply.speaker = Speaker::interviewee;
  reply.text = std::string(answer);
  reply.timestamp = now_rfc3339();
  next.turns.push_back(std::move(reply));

  AdvanceResult result;
  const auto* last = next.last_interviewer_turn();
  if (next.config.policy == Policy::baseline && last && last->ends_interview) {
    next.status = SessionStatus::completed;
    result.terminal = true;
  } else if (next.question_count >= next.config.max_turns) {
    next.status = SessionStatus::hard_stopped;
    result.terminal = true;
  } else {
    auto turn = next_interviewer_turn(next, gateway);
    result.next_turn = turn;
    apply_interviewer_turn(next, std::move(turn));
    result.terminal = next.terminal();
  }
  session = std::move(next);
  return result;
}

}  // namespace revint
