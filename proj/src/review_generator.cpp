#include "revint/review_generator.hpp"

#include <array>
#include <vector>

#include "revint/clock.hpp"
#include "revint/error.hpp"
#include "revint/text.hpp"

namespace revint {

std::string serialize_dialogue(const InterviewSession& session) {
  bool has_interviewer = false;
  bool has_interviewee = false;
  std::vector<std::string> lines;
  lines.reserve(session.turns.size());
  for (const auto& turn : session.turns) {
    if (turn.speaker == Speaker::interviewer) {
      has_interviewer = true;
      lines.push_back(std::string(kInterviewerPrefix) + " " + turn.text);
    } else {
      has_interviewee = true;
      lines.push_back(std::string(kIntervieweePrefix) + " " + turn.text);
    }
  }
  if (!has_interviewer || !has_interviewee)
    fail(ErrorCode::EmptyDialogue,
         "session " + session.id + " needs at least one question and one answer");
  return text::join(lines, "\n");
}

const PromptTemplate& review_prompt_template() {
  static const PromptTemplate tmpl(
      "[DIALOGUE]\n"
      "\n"
      "The above is a dialogue about \"[PRODUCT_NAME]\" between the interviewer and the "
      "interviewee who has touched on this product.\n"
      "\n"
      "Write a customer review about the product as if written by the interviewee, by briefly "
      "summarizing the important information mentioned in the above interview, such as the good "
      "and bad points of the product and the interviewee's experience with it.\n"
      "Do not output the review's title.\n"
      "The following is a body of the product review of the product written by the interviewee:",
      {"DIALOGUE", "PRODUCT_NAME"});
  return tmpl;
}

std::string build_review_prompt(const InterviewSession& session) {
  return review_prompt_template().render({
      {"DIALOGUE", serialize_dialogue(session)},
      {"PRODUCT_NAME", session.product.title},
  });
}

namespace {

constexpr std::array<std::string_view, 6> kLabels = {
    "review body", "review text", "product review", "customer review", "review", "body"};

void erase_all(std::string& s, std::string_view token) {
  for (auto pos = s.find(token); pos != std::string::npos; pos = s.find(token, pos))
    s.erase(pos, token.size());
}

std::string strip_quotes(std::string_view s) {
  constexpr std::string_view open_curly = "\xE2\x80\x9C";   // U+201C
  constexpr std::string_view close_curly = "\xE2\x80\x9D";  // U+201D
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return std::string(s.substr(1, s.size() - 2));
  if (s.size() >= open_curly.size() + close_curly.size() && s.starts_with(open_curly) &&
      s.ends_with(close_curly))
    return std::string(
        s.substr(open_curly.size(), s.size() - open_curly.size() - close_curly.size()));
  return std::string(s);
}

// "Review:" alone on the first line is dropped; "Review: text" keeps "text".
std::string strip_label(const std::string& s) {
  auto nl = s.find('\n');
  std::string_view first = std::string_view(s).substr(0, nl);
  for (auto label : kLabels) {
    if (!text::starts_with_ci(first, label)) continue;
    auto rest = text::trim(first.substr(label.size()));
    if (rest.empty() || rest.front() != ':') continue;
    rest = text::trim(rest.substr(1));
    std::string tail = nl == std::string::npos ? std::string() : s.substr(nl + 1);
    if (rest.empty()) return tail;
    return std::string(rest) + (nl == std::string::npos ? "" : "\n" + tail);
  }
  return s;
}

// A short first line without a closing period followed by a blank line.
std::string strip_title(const std::string& s) {
  auto lines = text::split_lines(s);
  if (lines.size() < 3) return s;
  auto first = text::trim(lines[0]);
  if (first.empty() || !text::is_blank(lines[1])) return s;
  if (text::count_words(first) > 8 || first.back() == '.') return s;
  std::size_t i = 1;
  while (i < lines.size() && text::is_blank(lines[i])) ++i;
  if (i == lines.size()) return s;
  std::vector<std::string> rest(lines.begin() + static_cast<std::ptrdiff_t>(i), lines.end());
  return text::join(rest, "\n");
}

std::string clean_once(std::string_view input) {
  std::string s(input);
  erase_all(s, kWaitForResponse);
  erase_all(s, kEndOfInterview);
  s = std::string(text::trim(s));
  s = std::string(text::trim(strip_quotes(s)));
  s = std::string(text::trim(strip_label(s)));
  s = std::string(text::trim(strip_title(s)));
  return s;
}

}  // namespace

std::string clean_review(std::string_view completion) {
  std::string current = clean_once(completion);
  for (;;) {
    auto next = clean_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

GeneratedReview generate_review(const InterviewSession& session, const Gateway& gateway,
                                GenerationParams params) {
  if (!session.terminal())
    fail(ErrorCode::SessionNotTerminal,
         "session " + session.id + " is " + std::string(to_string(session.status)));
  const std::vector<ChatMessage> messages{{Role::user, build_review_prompt(session)}};
  const auto completion = gateway.complete_chat(messages, params);
  GeneratedReview review;
  review.body = clean_review(completion);
  if (review.body.empty()) fail(ErrorCode::EmptyCompletion, "generator returned no review text");
  review.session_id = session.id;
  review.product_title = session.product.title;
  review.created_at = now_rfc3339();
  return review;
}

}  // namespace revint
