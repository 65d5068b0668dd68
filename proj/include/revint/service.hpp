#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "revint/gateway.hpp"
#include "revint/interviewer.hpp"
#include "revint/rating_predictor.hpp"
#include "revint/review_generator.hpp"
#include "revint/session_store.hpp"

namespace revint {

struct ServiceOptions {
  InterviewConfig interview;  // policy is chosen per session
  GenerationParams generator{kGeneratorTemperature, kDefaultMaxOutputTokens};
  GenerationParams predictor{kPredictorTemperature, kDefaultMaxOutputTokens};
};

struct TurnView {
  DialogueTurn turn;
  int question_count = 0;
  /// True for the last question the interview will ask.
  bool final_question = false;
};

struct CreateResult {
  std::string session_id;
  TurnView first;
};

struct MessageResult {
  std::optional<TurnView> next;
  bool terminal = false;
  SessionStatus status = SessionStatus::active;
  bool review_pending = false;  // terminal and not yet finalized
};

struct FinalizeResult {
  GeneratedReview review;
  RatingPrediction rating;
  bool cached = false;  // returned from the store without backend calls
};

/// The interview pipeline behind the HTTP API and the CLI. Mutating calls on
/// one session are serialized; different sessions proceed concurrently.
/// Every state change is persisted before the call returns.
class ReviewService {
 public:
  ReviewService(std::shared_ptr<SessionStore> store, std::shared_ptr<const Gateway> gateway,
                ExemplarSet exemplars, ServiceOptions options = {});

  CreateResult create_session(const ProductRef& product, Policy policy);
  MessageResult post_message(const std::string& session_id, std::string_view text);
  /// Exactly-once: the first call on a terminal session generates and stores
  /// the review and rating; later calls return the stored pair.
  FinalizeResult finalize(const std::string& session_id);
  StoredSession get(const std::string& session_id) const;
  /// Fills in respondent ids and arm from the session, then stores.
  FeedbackRecord submit_feedback(const std::string& session_id, FeedbackRecord feedback);

  const SessionStore& store() const noexcept { return *store_; }
  const Gateway& gateway() const noexcept { return *gateway_; }
  const ServiceOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<std::mutex> session_lock(const std::string& session_id);
  TurnView view(const InterviewSession& session, const DialogueTurn& turn) const;

  std::shared_ptr<SessionStore> store_;
  std::shared_ptr<const Gateway> gateway_;
  ExemplarSet exemplars_;
  ServiceOptions options_;

  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

// Store exports, also reachable without a running service.
nlohmann::json export_sessions(const SessionStore& store);
nlohmann::json export_reviews(const SessionStore& store);
nlohmann::json export_feedback(const SessionStore& store);
std::string export_likert_tsv(const SessionStore& store);

/// Arm recorded for feedback on a session run under `policy`.
Arm arm_for(Policy policy) noexcept;

}  // namespace revint
