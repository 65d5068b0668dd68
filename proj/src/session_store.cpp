#include "revint/session_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>

#include "revint/clock.hpp"
#include "revint/error.hpp"
#include "revint/log.hpp"
#include "revint/serialization.hpp"

namespace revint {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<RewriteFraction, std::string_view>, 5> kFractions = {{
    {RewriteFraction::none, "none"},
    {RewriteFraction::up_to_25, "<=25%"},
    {RewriteFraction::from_26_to_50, "26-50%"},
    {RewriteFraction::from_51_to_75, "51-75%"},
    {RewriteFraction::over_75, ">75%"},
}};

[[noreturn]] void bad_feedback(const std::string& what) { fail(ErrorCode::InvalidFeedback, what); }

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string_view to_string(RewriteFraction f) noexcept {
  for (const auto& [value, name] : kFractions)
    if (value == f) return name;
  return "none";
}

std::optional<RewriteFraction> rewrite_fraction_from_string(std::string_view s) {
  for (const auto& [value, name] : kFractions)
    if (name == s) return value;
  // Unicode spellings as shown to participants.
  if (s == "≤25%") return RewriteFraction::up_to_25;
  if (s == "26–50%") return RewriteFraction::from_26_to_50;
  if (s == "51–75%") return RewriteFraction::from_51_to_75;
  return std::nullopt;
}

void to_json(json& j, const FeedbackRecord& f) {
  json likert = json::array();
  for (const auto& r : f.likert)
    likert.push_back({{"item", std::string(to_string(r.item))},
                      {"value", r.value},
                      {"arm", std::string(to_string(r.arm))},
                      {"respondent_id", r.respondent_id},
                      {"never_reviewed", r.never_reviewed}});
  j = {{"session_id", f.session_id},
       {"rewrite_fraction", std::string(to_string(f.rewrite_fraction))},
       {"likert", likert},
       {"submitted_at", f.submitted_at}};
  if (f.re_rating) j["re_rating"] = *f.re_rating;
  if (f.free_text) j["free_text"] = *f.free_text;
  if (f.edited_review) j["edited_review"] = *f.edited_review;
  if (f.posting_frequency) j["posting_frequency"] = *f.posting_frequency;
}

void from_json(const json& j, FeedbackRecord& f) {
  if (!j.is_object()) bad_feedback("feedback must be a JSON object");
  try {
    f.session_id = j.value("session_id", "");
    const auto fraction = j.at("rewrite_fraction").get<std::string>();
    auto parsed = rewrite_fraction_from_string(fraction);
    if (!parsed) bad_feedback("unknown rewrite_fraction '" + fraction + "'");
    f.rewrite_fraction = *parsed;

    f.likert.clear();
    std::set<LikertItem> seen;
    for (const auto& entry : j.at("likert")) {
      const auto label = entry.at("item").get<std::string>();
      auto item = likert_item_from_string(label);
      if (!item) fail(ErrorCode::InvalidLikertLabel, "unknown Likert item '" + label + "'");
      if (!seen.insert(*item).second) bad_feedback("Likert item '" + label + "' given twice");
      LikertResponse r;
      r.item = *item;
      r.value = entry.at("value").get<int>();
      if (r.value < 1 || r.value > 5) bad_feedback("Likert value for '" + label + "' outside 1..5");
      const auto arm = entry.value("arm", "ours");
      auto parsed_arm = arm_from_string(arm);
      if (!parsed_arm) bad_feedback("unknown arm '" + arm + "'");
      r.arm = *parsed_arm;
      r.respondent_id = entry.value("respondent_id", "");
      r.never_reviewed = entry.value("never_reviewed", false);
      f.likert.push_back(std::move(r));
    }

    f.re_rating = optional_field<int>(j, "re_rating");
    if (f.re_rating && (*f.re_rating < 1 || *f.re_rating > 5)) bad_feedback("re_rating outside 1..5");
    f.free_text = optional_field<std::string>(j, "free_text");
    f.edited_review = optional_field<std::string>(j, "edited_review");
    f.posting_frequency = optional_field<std::string>(j, "posting_frequency");
    f.submitted_at = j.value("submitted_at", "");
  } catch (const json::exception& e) {
    bad_feedback(e.what());
  }
}

// --- store ------------------------------------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path path) : path_(std::move(path)) {
  if (!path_.empty() && std::filesystem::exists(path_)) replay();
}

void SessionStore::replay() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) fail(ErrorCode::StorageFailure, "cannot open store " + path_.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      // No terminating newline: the process died mid-append.
      log::warn(path_.string() + ":" + std::to_string(line_no) +
                ": dropping incomplete final record");
      std::filesystem::resize_file(path_, pos);
      break;
    }
    const std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      apply(json::parse(line));
    } catch (const json::exception& e) {
      fail(ErrorCode::StorageFailure,
           path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::StorageFailure,
           path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void SessionStore::apply(const json& event) {
  const auto kind = event.at("event").get<std::string>();
  if (kind == "session") {
    auto session = event.at("session").get<InterviewSession>();
    auto it = sessions_.find(session.id);
    if (it == sessions_.end()) {
      order_.push_back(session.id);
      sessions_[session.id].session = std::move(session);
    } else {
      it->second.session = std::move(session);
    }
  } else if (kind == "finalized") {
    const auto id = event.at("session_id").get<std::string>();
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::NotFound, "finalization for unknown session " + id);
    if (!it->second.session.terminal())
      fail(ErrorCode::SessionNotTerminal, "finalization for non-terminal session " + id);
    it->second.review = event.at("review").get<GeneratedReview>();
    it->second.rating = event.at("rating").get<RatingPrediction>();
  } else if (kind == "feedback") {
    auto feedback = event.at("feedback").get<FeedbackRecord>();
    auto it = sessions_.find(feedback.session_id);
    if (it == sessions_.end())
      fail(ErrorCode::NotFound, "feedback for unknown session " + feedback.session_id);
    if (!it->second.finalized())
      fail(ErrorCode::NotFinalized, "feedback for unfinalized session " + feedback.session_id);
    it->second.feedback = std::move(feedback);
  } else {
    fail(ErrorCode::StorageFailure, "unknown event '" + kind + "'");
  }
}

void SessionStore::append(const json& event) {
  if (path_.empty()) return;
  const std::string line = event.dump() + "\n";
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorCode::StorageFailure, "open " + path_.string() + ": " + std::strerror(errno));
  const auto written = ::write(fd, line.data(), line.size());
  const int saved = errno;
  const bool synced = ::fdatasync(fd) == 0;
  ::close(fd);
  if (written != static_cast<ssize_t>(line.size()) || !synced)
    fail(ErrorCode::StorageFailure, "append to " + path_.string() + ": " + std::strerror(saved));
}

// Preconditions are checked before appending, so a rejected event reaches
// neither the log nor memory.

void SessionStore::save_session(const InterviewSession& session) {
  if (auto violation = check_invariants(session))
    fail(ErrorCode::PreconditionViolated, "session " + session.id + ": " + *violation);
  const json event = {{"event", "session"}, {"at", now_rfc3339()}, {"session", session}};
  std::lock_guard lock(mu_);
  append(event);
  apply(event);
}

void SessionStore::save_finalization(const std::string& session_id, const GeneratedReview& review,
                                     const RatingPrediction& rating) {
  const json event = {{"event", "finalized"},
                      {"at", now_rfc3339()},
                      {"session_id", session_id},
                      {"review", review},
                      {"rating", rating}};
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) fail(ErrorCode::NotFound, "unknown session " + session_id);
  if (!it->second.session.terminal())
    fail(ErrorCode::SessionNotTerminal, "session " + session_id + " is still active");
  if (review.session_id != session_id)
    fail(ErrorCode::PreconditionViolated, "review belongs to session " + review.session_id);
  append(event);
  apply(event);
}

void SessionStore::save_feedback(const FeedbackRecord& feedback) {
  const json event = {{"event", "feedback"}, {"at", now_rfc3339()}, {"feedback", feedback}};
  std::lock_guard lock(mu_);
  auto it = sessions_.find(feedback.session_id);
  if (it == sessions_.end()) fail(ErrorCode::NotFound, "unknown session " + feedback.session_id);
  if (!it->second.finalized())
    fail(ErrorCode::NotFinalized, "session " + feedback.session_id + " has not been finalized");
  append(event);
  apply(event);
}

std::optional<StoredSession> SessionStore::find(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

StoredSession SessionStore::get(const std::string& session_id) const {
  auto found = find(session_id);
  if (!found) fail(ErrorCode::NotFound, "unknown session " + session_id);
  return *std::move(found);
}

std::vector<StoredSession> SessionStore::all() const {
  std::lock_guard lock(mu_);
  std::vector<StoredSession> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(sessions_.at(id));
  return out;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::optional<std::string> SessionStore::validate() const {
  std::lock_guard lock(mu_);
  if (order_.size() != sessions_.size()) return "creation order and index disagree";
  for (const auto& [id, stored] : sessions_) {
    if (id != stored.session.id) return "entry " + id + " holds session " + stored.session.id;
    if (auto v = check_invariants(stored.session)) return "session " + id + ": " + *v;
    if (stored.review.has_value() != stored.rating.has_value())
      return "session " + id + " has only one of review and rating";
    if (stored.review) {
      if (!stored.session.terminal()) return "session " + id + " has a review but is not terminal";
      if (stored.review->session_id != id) return "review stored under " + id + " references another session";
      if (stored.rating->rating < 1 || stored.rating->rating > 5) return "rating outside 1..5 for " + id;
    }
    if (stored.feedback) {
      if (!stored.finalized()) return "session " + id + " has feedback but no review";
      if (stored.feedback->session_id != id) return "feedback stored under " + id + " references another session";
      for (const auto& r : stored.feedback->likert)
        if (r.value < 1 || r.value > 5) return "Likert value outside 1..5 for " + id;
    }
  }
  return std::nullopt;
}

}  // namespace revint
