#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "revint/error.hpp"
#include "revint/service.hpp"
#include "shaver_script.hpp"
#include "temp_dir.hpp"

using namespace revint;
using namespace revint::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("checked-in cassette matches a fresh recording of the script") {
  TempDir dir;
  const auto fresh = dir / "fresh.jsonl";
  record_shaver_cassette(load_shaver_script(source_path("tests/fixtures/shaver_script.json")),
                         source_path("data/rating_exemplars.json"), fresh);
  // On mismatch, regenerate with the make_shaver_cassette tool.
  CHECK(slurp(fresh) == read_fixture("tests/fixtures/shaver_cassette.jsonl"));
}

TEST_CASE("replaying the cassette reproduces the review and rating") {
  const auto script = load_shaver_script(source_path("tests/fixtures/shaver_script.json"));
  auto backend = std::make_shared<ReplayBackend>(Cassette::load(source_path("tests/fixtures/shaver_cassette.jsonl")));
  ReviewService service(std::make_shared<SessionStore>(), std::make_shared<Gateway>(backend),
                        ExemplarSet::load(source_path("data/rating_exemplars.json")));
  const auto id = service.create_session({script.product_title, "Beauty & Personal Care", ""}, Policy::adaptive)
                      .session_id;
  for (const auto& answer : script.answers) service.post_message(id, answer);
  const auto session = service.get(id).session;
  CHECK(session.status == SessionStatus::completed);
  CHECK(session.question_count == 9);
  CHECK_FALSE(session.protocol_violation);
  const auto result = service.finalize(id);
  CHECK(result.review.body == script.review_completion);
  CHECK(result.rating.rating == 4);
}

TEST_CASE("a different answer misses the cassette") {
  const auto script = load_shaver_script(source_path("tests/fixtures/shaver_script.json"));
  auto backend = std::make_shared<ReplayBackend>(Cassette::load(source_path("tests/fixtures/shaver_cassette.jsonl")));
  ReviewService service(std::make_shared<SessionStore>(), std::make_shared<Gateway>(backend),
                        ExemplarSet::load(source_path("data/rating_exemplars.json")));
  const auto id = service.create_session({script.product_title, "Beauty & Personal Care", ""}, Policy::adaptive)
                      .session_id;
  try {
    service.post_message(id, "something nobody recorded");
    FAIL("expected ReplayMiss");
  } catch (const revint::Error& e) {
    CHECK(e.code() == ErrorCode::ReplayMiss);
  }
  CHECK(service.get(id).session.question_count == 1);
}
