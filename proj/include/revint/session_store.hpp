#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "revint/evaluation.hpp"
#include "revint/interviewer.hpp"
#include "revint/rating_predictor.hpp"
#include "revint/review_generator.hpp"

namespace revint {

enum class RewriteFraction { none, up_to_25, from_26_to_50, from_51_to_75, over_75 };
std::string_view to_string(RewriteFraction f) noexcept;  // "none", "<=25%", "26-50%", "51-75%", ">75%"
std::optional<RewriteFraction> rewrite_fraction_from_string(std::string_view s);

/// Post-interview survey answers for one session. `likert` entries carry the
/// session id as respondent and the arm implied by the session's policy.
struct FeedbackRecord {
  std::string session_id;
  RewriteFraction rewrite_fraction = RewriteFraction::none;
  std::vector<LikertResponse> likert;
  std::optional<int> re_rating;
  std::optional<std::string> free_text;
  std::optional<std::string> edited_review;
  /// How often the respondent writes reviews; "never" marks the Likert
  /// answers as coming from someone who never reviews.
  std::optional<std::string> posting_frequency;
  std::string submitted_at;

  bool operator==(const FeedbackRecord&) const = default;
};

void to_json(nlohmann::json& j, const FeedbackRecord& f);
/// Throws InvalidLikertLabel for an unknown item label and InvalidFeedback
/// for any other malformed field.
void from_json(const nlohmann::json& j, FeedbackRecord& f);

struct StoredSession {
  InterviewSession session;
  std::optional<GeneratedReview> review;
  std::optional<RatingPrediction> rating;
  std::optional<FeedbackRecord> feedback;

  bool finalized() const noexcept { return review.has_value() && rating.has_value(); }
  bool operator==(const StoredSession&) const = default;
};

/// Sessions and their artifacts, persisted as an append-only JSON-lines event
/// log. Each mutation appends one record with a single write; reopening the
/// file replays the log. A torn final line (crash mid-write) is dropped and
/// truncated away with a warning; a corrupt line elsewhere is a
/// StorageFailure. An empty path keeps everything in memory.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path path = {});

  void save_session(const InterviewSession& session);
  /// Requires an existing, terminal session.
  void save_finalization(const std::string& session_id, const GeneratedReview& review,
                         const RatingPrediction& rating);
  /// Requires an existing, finalized session.
  void save_feedback(const FeedbackRecord& feedback);

  std::optional<StoredSession> find(const std::string& session_id) const;
  StoredSession get(const std::string& session_id) const;  // NotFound
  std::vector<StoredSession> all() const;                   // creation order
  std::size_t size() const;

  /// First violated store invariant, or nullopt.
  std::optional<std::string> validate() const;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void replay();
  void apply(const nlohmann::json& event);
  void append(const nlohmann::json& event);

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, StoredSession> sessions_;
  std::vector<std::string> order_;
};

}  // namespace revint
