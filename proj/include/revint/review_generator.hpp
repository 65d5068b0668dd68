#pragma once

#include <string>
#include <string_view>

#include "revint/gateway.hpp"
#include "revint/interviewer.hpp"
#include "revint/prompt_template.hpp"

namespace revint {

struct GeneratedReview {
  std::string body;
  std::string session_id;
  std::string product_title;
  std::string created_at;

  bool operator==(const GeneratedReview&) const = default;
};

/// "Interviewer: ..." / "Interviewee: ..." lines in turn order.
std::string serialize_dialogue(const InterviewSession& session);

const PromptTemplate& review_prompt_template();
std::string build_review_prompt(const InterviewSession& session);

/// Post-processing applied to the raw completion: surrounding quotes, label
/// lines ("Review:"), title lines and control tokens are removed. Applied to
/// a fixpoint, so clean_review(clean_review(x)) == clean_review(x).
std::string clean_review(std::string_view completion);

/// Requires a terminal session; runs the generator at `params` (temperature
/// 0 by default).
GeneratedReview generate_review(const InterviewSession& session, const Gateway& gateway,
                                GenerationParams params = {kGeneratorTemperature,
                                                           kDefaultMaxOutputTokens});

}  // namespace revint
