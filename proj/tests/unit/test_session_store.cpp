#include <doctest.h>

#include <fstream>

#include "log_capture.hpp"
#include "revint/error.hpp"
#include "revint/session_store.hpp"
#include "temp_dir.hpp"

using namespace revint;
using revint::testing::LogCapture;
using revint::testing::TempDir;

namespace {

std::string question(int i) { return "Interviewer: Question " + std::to_string(i) + "? [Wait_for_Response]"; }

/// A session with `answers` answers under max_turns = 2, so two answers
/// hard-stop it.
InterviewSession make_session(int answers) {
  std::vector<std::string> script;
  for (int i = 1; i <= 3; ++i) script.push_back(question(i));
  Gateway gw(std::make_shared<ScriptedBackend>(script));
  InterviewConfig cfg;
  cfg.min_questions = 1;
  cfg.max_turns = 2;
  auto s = start_interview({"Kettle", "Kitchen", ""}, cfg, gw).session;
  for (int i = 0; i < answers; ++i) advance_interview(s, "answer " + std::to_string(i), gw);
  return s;
}

GeneratedReview review_for(const InterviewSession& s) { return {"It boils fast.", s.id, s.product.title, "t"}; }
RatingPrediction rating4() { return {4, "Good.", "Good.\nRating: 4"}; }

FeedbackRecord feedback_for(const InterviewSession& s) {
  FeedbackRecord f;
  f.session_id = s.id;
  f.rewrite_fraction = RewriteFraction::up_to_25;
  f.likert = {{s.id, LikertItem::Quality, 4, Arm::ours, false}, {s.id, LikertItem::BurdenedR, 2, Arm::ours, false}};
  f.re_rating = 5;
  f.free_text = "fine";
  f.submitted_at = "2026-01-01T00:00:00.000Z";
  return f;
}

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("reload reproduces every stored artifact") {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  std::vector<StoredSession> before;
  {
    SessionStore store(path);
    auto done = make_session(2);
    auto half = make_session(1);
    store.save_session(done);
    store.save_session(half);
    store.save_finalization(done.id, review_for(done), rating4());
    store.save_feedback(feedback_for(done));
    CHECK_FALSE(store.validate());
    before = store.all();
  }
  SessionStore reopened(path);
  CHECK(reopened.all() == before);
  CHECK(reopened.size() == 2);
  CHECK_FALSE(reopened.validate());
}

TEST_CASE("later snapshots replace earlier ones") {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  auto s = make_session(0);
  {
    SessionStore store(path);
    store.save_session(s);
    advance_interview(s, "more", Gateway(std::make_shared<ScriptedBackend>(std::vector<std::string>{question(9)})));
    store.save_session(s);
  }
  SessionStore reopened(path);
  CHECK(reopened.size() == 1);
  CHECK(reopened.get(s.id).session == s);
}

TEST_CASE("referential checks") {
  SessionStore store;
  auto active = make_session(1);
  store.save_session(active);
  CHECK(code_of([&] { store.save_finalization("nope", review_for(active), rating4()); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { store.save_finalization(active.id, review_for(active), rating4()); }) ==
        ErrorCode::SessionNotTerminal);
  CHECK(code_of([&] { store.save_feedback(feedback_for(active)); }) == ErrorCode::NotFinalized);
  auto orphan = feedback_for(active);
  orphan.session_id = "missing";
  CHECK(code_of([&] { store.save_feedback(orphan); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { store.get("missing"); }) == ErrorCode::NotFound);

  auto done = make_session(2);
  store.save_session(done);
  auto wrong = review_for(done);
  wrong.session_id = active.id;
  CHECK(code_of([&] { store.save_finalization(done.id, wrong, rating4()); }) == ErrorCode::PreconditionViolated);
  CHECK_FALSE(store.get(done.id).finalized());

  auto broken = done;
  broken.question_count = 7;
  CHECK(code_of([&] { store.save_session(broken); }) == ErrorCode::PreconditionViolated);
  CHECK_FALSE(store.validate());
}

TEST_CASE("rejected events never reach the log") {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  SessionStore store(path);
  auto active = make_session(1);
  store.save_session(active);
  const auto size = std::filesystem::file_size(path);
  CHECK_THROWS(store.save_finalization(active.id, review_for(active), rating4()));
  CHECK(std::filesystem::file_size(path) == size);
}

TEST_CASE("torn final line is dropped with a warning") {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  auto s = make_session(2);
  {
    SessionStore store(path);
    store.save_session(s);
  }
  const auto good = slurp(path);
  std::ofstream(path, std::ios::app | std::ios::binary) << R"({"event":"finalized","session_)";
  LogCapture logs;
  SessionStore reopened(path);
  CHECK(reopened.get(s.id).session == s);
  CHECK(logs.contains("incomplete final record"));
  CHECK(slurp(path) == good);
  // The store stays writable after recovery.
  reopened.save_finalization(s.id, review_for(s), rating4());
  SessionStore again(path);
  CHECK(again.get(s.id).finalized());
}

TEST_CASE("corrupt line before the end is a storage failure") {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  {
    SessionStore store(path);
    store.save_session(make_session(2));
  }
  const auto good = slurp(path);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "{not json}\n" << good;
  }
  CHECK(code_of([&] { SessionStore{path}; }) == ErrorCode::StorageFailure);
}

TEST_CASE("unknown event kind and dangling references fail on reload") {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  std::ofstream(path) << R"({"event":"mystery"})" << "\n";
  CHECK(code_of([&] { SessionStore{path}; }) == ErrorCode::StorageFailure);
  std::ofstream(path, std::ios::trunc) << R"({"event":"feedback","feedback":{"session_id":"x","rewrite_fraction":"none","likert":[]}})"
                                       << "\n";
  CHECK(code_of([&] { SessionStore{path}; }) == ErrorCode::StorageFailure);
}

TEST_CASE("in-memory store writes nothing") {
  SessionStore store;
  CHECK(store.path().empty());
  store.save_session(make_session(0));
  CHECK(store.size() == 1);
}

TEST_CASE("feedback JSON round-trip and validation") {
  auto s = make_session(2);
  const auto f = feedback_for(s);
  const nlohmann::json j = f;
  CHECK(j.get<FeedbackRecord>() == f);

  auto with = [&](auto mutate) {
    nlohmann::json copy = j;
    mutate(copy);
    return code_of([&] { (void)copy.get<FeedbackRecord>(); });
  };
  CHECK(with([](nlohmann::json& x) { x["likert"][0]["item"] = "Speed"; }) == ErrorCode::InvalidLikertLabel);
  CHECK(with([](nlohmann::json& x) { x["likert"][0]["value"] = 6; }) == ErrorCode::InvalidFeedback);
  CHECK(with([](nlohmann::json& x) { x["likert"][1]["item"] = "Quality"; }) == ErrorCode::InvalidFeedback);
  CHECK(with([](nlohmann::json& x) { x["rewrite_fraction"] = "most"; }) == ErrorCode::InvalidFeedback);
  CHECK(with([](nlohmann::json& x) { x["re_rating"] = 0; }) == ErrorCode::InvalidFeedback);
  CHECK(with([](nlohmann::json& x) { x.erase("likert"); }) == ErrorCode::InvalidFeedback);
  CHECK(with([](nlohmann::json& x) { x["rewrite_fraction"] = "≤25%"; }) == std::nullopt);
}
