#include "revint/service.hpp"

#include "revint/clock.hpp"
#include "revint/error.hpp"
#include "revint/serialization.hpp"

namespace revint {

using nlohmann::json;

Arm arm_for(Policy policy) noexcept { return policy == Policy::adaptive ? Arm::ours : Arm::baseline; }

ReviewService::ReviewService(std::shared_ptr<SessionStore> store,
                             std::shared_ptr<const Gateway> gateway, ExemplarSet exemplars,
                             ServiceOptions options)
    : store_(std::move(store)),
      gateway_(std::move(gateway)),
      exemplars_(std::move(exemplars)),
      options_(options) {
  if (!store_ || !gateway_)
    fail(ErrorCode::PreconditionViolated, "service needs a session store and a gateway");
  options_.interview.validate();
}

std::shared_ptr<std::mutex> ReviewService::session_lock(const std::string& session_id) {
  std::lock_guard lock(locks_mu_);
  auto& slot = locks_[session_id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

TurnView ReviewService::view(const InterviewSession& session, const DialogueTurn& turn) const {
  TurnView v{turn, session.question_count, false};
  v.final_question = turn.ends_interview || session.question_count >= session.config.max_turns;
  return v;
}

CreateResult ReviewService::create_session(const ProductRef& product, Policy policy) {
  auto config = options_.interview;
  config.policy = policy;
  auto started = start_interview(product, config, *gateway_);
  store_->save_session(started.session);
  return {started.session.id, view(started.session, started.first_turn)};
}

MessageResult ReviewService::post_message(const std::string& session_id, std::string_view text) {
  auto lock_ptr = session_lock(session_id);
  std::lock_guard lock(*lock_ptr);

  auto stored = store_->get(session_id);
  auto& session = stored.session;
  const auto advanced = advance_interview(session, text, *gateway_);
  store_->save_session(session);

  MessageResult result;
  if (advanced.next_turn) result.next = view(session, *advanced.next_turn);
  result.terminal = advanced.terminal;
  result.status = session.status;
  result.review_pending = advanced.terminal;
  return result;
}

FinalizeResult ReviewService::finalize(const std::string& session_id) {
  auto lock_ptr = session_lock(session_id);
  std::lock_guard lock(*lock_ptr);

  const auto stored = store_->get(session_id);
  if (stored.finalized()) return {*stored.review, *stored.rating, true};
  if (!stored.session.terminal())
    fail(ErrorCode::SessionNotTerminal, "session " + session_id + " is still " +
                                            std::string(to_string(stored.session.status)));

  auto review = generate_review(stored.session, *gateway_, options_.generator);
  auto rating = predict_rating(stored.session.product.title, review.body, exemplars_, *gateway_,
                               options_.predictor);
  store_->save_finalization(session_id, review, rating);
  return {std::move(review), std::move(rating), false};
}

StoredSession ReviewService::get(const std::string& session_id) const { return store_->get(session_id); }

FeedbackRecord ReviewService::submit_feedback(const std::string& session_id, FeedbackRecord feedback) {
  auto lock_ptr = session_lock(session_id);
  std::lock_guard lock(*lock_ptr);

  const auto stored = store_->get(session_id);
  if (!stored.finalized())
    fail(ErrorCode::NotFinalized, "session " + session_id + " has not been finalized");
  if (!feedback.session_id.empty() && feedback.session_id != session_id)
    fail(ErrorCode::InvalidFeedback, "feedback names session " + feedback.session_id);

  feedback.session_id = session_id;
  const bool never = feedback.posting_frequency && *feedback.posting_frequency == "never";
  for (auto& r : feedback.likert) {
    r.respondent_id = session_id;
    r.arm = arm_for(stored.session.config.policy);
    r.never_reviewed = never;
  }
  if (feedback.submitted_at.empty()) feedback.submitted_at = now_rfc3339();
  store_->save_feedback(feedback);
  return feedback;
}

json export_sessions(const SessionStore& store) {
  json out = json::array();
  for (const auto& s : store.all()) out.push_back(s.session);
  return out;
}

json export_reviews(const SessionStore& store) {
  json out = json::array();
  for (const auto& s : store.all()) {
    if (!s.finalized()) continue;
    json row = *s.review;
    row["rating"] = s.rating->rating;
    row["reasoning"] = s.rating->reasoning;
    row["policy"] = std::string(to_string(s.session.config.policy));
    out.push_back(std::move(row));
  }
  return out;
}

json export_feedback(const SessionStore& store) {
  json out = json::array();
  for (const auto& s : store.all())
    if (s.feedback) out.push_back(*s.feedback);
  return out;
}

/// Likert answers of every feedback record, in the evaluation TSV format.
std::string export_likert_tsv(const SessionStore& store) {
  std::vector<LikertResponse> rows;
  for (const auto& s : store.all())
    if (s.feedback) rows.insert(rows.end(), s.feedback->likert.begin(), s.feedback->likert.end());
  return likert_to_tsv(rows);
}

}  // namespace revint
