#include "revint/serialization.hpp"

namespace revint {

using nlohmann::json;

void to_json(json& j, const ProductRef& p) {
  j = {{"title", p.title}, {"category", p.category}, {"external_id", p.external_id}};
}

void from_json(const json& j, ProductRef& p) {
  p.title = j.at("title").get<std::string>();
  p.category = j.value("category", "");
  p.external_id = j.value("external_id", "");
}

void to_json(json& j, const InterviewConfig& c) {
  j = {{"min_questions", c.min_questions},
       {"max_turns", c.max_turns},
       {"temperature", c.temperature},
       {"max_output_tokens", c.max_output_tokens},
       {"policy", std::string(to_string(c.policy))}};
}

void from_json(const json& j, InterviewConfig& c) {
  c.min_questions = j.at("min_questions").get<int>();
  c.max_turns = j.at("max_turns").get<int>();
  c.temperature = j.at("temperature").get<double>();
  c.max_output_tokens = j.value("max_output_tokens", kDefaultMaxOutputTokens);
  c.policy = policy_from_string(j.at("policy").get<std::string>());
}

void to_json(json& j, const DialogueTurn& t) {
  j = {{"index", t.index},
       {"speaker", std::string(to_string(t.speaker))},
       {"text", t.text},
       {"awaits_response", t.awaits_response},
       {"ends_interview", t.ends_interview},
       {"timestamp", t.timestamp}};
  if (t.speaker == Speaker::interviewer) j["raw"] = t.raw;
}

void from_json(const json& j, DialogueTurn& t) {
  t.index = j.at("index").get<int>();
  t.speaker = speaker_from_string(j.at("speaker").get<std::string>());
  t.text = j.at("text").get<std::string>();
  t.awaits_response = j.value("awaits_response", false);
  t.ends_interview = j.value("ends_interview", false);
  t.raw = j.value("raw", "");
  t.timestamp = j.value("timestamp", "");
}

void to_json(json& j, const InterviewSession& s) {
  j = {{"id", s.id},
       {"product", s.product},
       {"config", s.config},
       {"turns", s.turns},
       {"status", std::string(to_string(s.status))},
       {"question_count", s.question_count},
       {"protocol_violation", s.protocol_violation},
       {"created_at", s.created_at}};
}

void from_json(const json& j, InterviewSession& s) {
  s.id = j.at("id").get<std::string>();
  s.product = j.at("product").get<ProductRef>();
  s.config = j.at("config").get<InterviewConfig>();
  s.turns = j.at("turns").get<std::vector<DialogueTurn>>();
  s.status = status_from_string(j.at("status").get<std::string>());
  s.question_count = j.at("question_count").get<int>();
  s.protocol_violation = j.value("protocol_violation", false);
  s.created_at = j.value("created_at", "");
}

void to_json(json& j, const GeneratedReview& r) {
  j = {{"session_id", r.session_id},
       {"product_title", r.product_title},
       {"body", r.body},
       {"created_at", r.created_at}};
}

void from_json(const json& j, GeneratedReview& r) {
  r.session_id = j.at("session_id").get<std::string>();
  r.product_title = j.at("product_title").get<std::string>();
  r.body = j.at("body").get<std::string>();
  r.created_at = j.value("created_at", "");
}

void to_json(json& j, const RatingPrediction& r) {
  j = {{"rating", r.rating}, {"reasoning", r.reasoning}, {"raw_completion", r.raw_completion}};
}

void from_json(const json& j, RatingPrediction& r) {
  r.rating = j.at("rating").get<int>();
  r.reasoning = j.value("reasoning", "");
  r.raw_completion = j.value("raw_completion", "");
}

}  // namespace revint
