#include <doctest.h>

#include <httplib.h>

#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "log_capture.hpp"
#include "revint/http_api.hpp"
#include "rule_backend.hpp"

using namespace revint;
using nlohmann::json;
using revint::testing::RuleBackend;

namespace {

/// The service behind a live HTTP server on a free local port.
class LiveServer {
 public:
  explicit LiveServer(ServiceOptions opts = {})
      : backend(std::make_shared<RuleBackend>()),
        store(std::make_shared<SessionStore>()),
        service(store, std::make_shared<Gateway>(backend, RetryPolicy{1, std::chrono::milliseconds(0)}),
                ExemplarSet::load(revint::testing::source_path("data/rating_exemplars.json")), opts) {
    register_routes(server_, service);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }

  struct Reply {
    int status = 0;
    json body;
    std::string raw;
  };

  Reply post(const std::string& path, const std::string& body = "{}") {
    auto r = client_->Post(path, body, "application/json");
    REQUIRE(r);
    return {r->status, json::parse(r->body, nullptr, false), r->body};
  }
  Reply post(const std::string& path, const json& body) { return post(path, body.dump()); }
  Reply get(const std::string& path) {
    auto r = client_->Get(path);
    REQUIRE(r);
    return {r->status, json::parse(r->body, nullptr, false), r->body};
  }

  std::string create(const std::string& policy = "adaptive") {
    auto r = post("/sessions", json{{"product_title", "BrewMaster Kettle"}, {"policy", policy}});
    REQUIRE(r.status == 201);
    return r.body["session_id"];
  }

  /// Answers until the session ends; returns the number of questions seen.
  int run_to_end(const std::string& id, json* last_question = nullptr) {
    int asked = 1;
    while (true) {
      auto r = post("/sessions/" + id + "/messages", json{{"text", "An answer."}});
      REQUIRE(r.status == 200);
      if (r.body["terminal"]) return asked;
      ++asked;
      if (last_question) *last_question = r.body["next_question"];
    }
  }

  std::shared_ptr<RuleBackend> backend;
  std::shared_ptr<SessionStore> store;
  ReviewService service;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

json likert(std::initializer_list<std::pair<const char*, int>> items) {
  json out = json::array();
  for (auto [item, v] : items) out.push_back({{"item", item}, {"value", v}});
  return out;
}

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::EmptyProductTitle) == 400);
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::SessionNotActive) == 409);
  CHECK(http_status(ErrorCode::SessionNotTerminal) == 409);
  CHECK(http_status(ErrorCode::InvalidLikertLabel) == 422);
  CHECK(http_status(ErrorCode::ReplayMiss) == 502);
  CHECK(http_status(ErrorCode::StorageFailure) == 500);
}

TEST_CASE("full adaptive session over HTTP") {
  LiveServer srv;
  auto created = srv.post("/sessions", json{{"product_title", "BrewMaster Kettle"}, {"category", "Kitchen"}});
  CHECK(created.status == 201);
  CHECK(created.body["policy"] == "adaptive");
  CHECK(created.body["status"] == "active");
  CHECK(created.body["first_question"]["question_count"] == 1);
  const std::string id = created.body["session_id"];

  CHECK(srv.post("/sessions/" + id + "/finalize").status == 409);

  json last;
  CHECK(srv.run_to_end(id, &last) == 15);
  CHECK(last["question_count"] == 15);
  CHECK(last["final_question"] == true);

  CHECK(srv.post("/sessions/" + id + "/messages", json{{"text", "late"}}).status == 409);

  auto fin = srv.post("/sessions/" + id + "/finalize");
  CHECK(fin.status == 200);
  CHECK(fin.body["review_body"] == srv.backend->review);
  CHECK(fin.body["rating"] == 3);
  CHECK(fin.body["cached"] == false);
  CHECK(srv.post("/sessions/" + id + "/finalize").body["cached"] == true);

  auto got = srv.get("/sessions/" + id);
  CHECK(got.status == 200);
  CHECK(got.body["finalized"] == true);
  CHECK(got.body["session"]["status"] == "hard_stopped");
  CHECK(got.body["rating"]["rating"] == 3);
}

TEST_CASE("baseline session opens with the first fixed question") {
  LiveServer srv;
  auto created = srv.post("/sessions", json{{"product_title", "Kettle"}, {"policy", "baseline"}});
  CHECK(created.status == 201);
  CHECK(created.body["first_question"]["text"] == std::string(baseline_question(0)));
  CHECK(srv.run_to_end(created.body["session_id"]) == 9);
}

TEST_CASE("input errors map to 400 and 404") {
  LiveServer srv;
  CHECK(srv.post("/sessions", json{{"product_title", "  "}}).body["error"] == "EmptyProductTitle");
  CHECK(srv.post("/sessions", json{{"product_title", "  "}}).status == 400);
  CHECK(srv.post("/sessions", json{{"product_title", "K"}, {"policy", "random"}}).status == 400);
  CHECK(srv.post("/sessions", std::string("{broken")).status == 400);
  CHECK(srv.post("/sessions", std::string("[1]")).status == 400);
  CHECK(srv.post("/sessions", json{{"product_title", 7}}).status == 400);
  const auto id = srv.create();
  CHECK(srv.post("/sessions/" + id + "/messages", json{{"text", ""}}).status == 400);
  CHECK(srv.post("/sessions/abc123/messages", json{{"text", "x"}}).status == 404);
  CHECK(srv.get("/sessions/abc123").status == 404);
  auto unknown = srv.get("/nowhere");
  CHECK(unknown.status == 404);
  CHECK(unknown.body["error"] == "NotFound");
}

TEST_CASE("backend failure maps to 502 and leaves the session retryable") {
  revint::testing::LogCapture quiet;
  LiveServer srv;
  const auto id = srv.create();
  srv.run_to_end(id);
  srv.backend->withhold_rating = true;
  auto r = srv.post("/sessions/" + id + "/finalize");
  CHECK(r.status == 502);
  CHECK(r.body["error"] == "NoRatingFound");
  srv.backend->withhold_rating = false;
  CHECK(srv.post("/sessions/" + id + "/finalize").status == 200);
}

TEST_CASE("feedback endpoint") {
  LiveServer srv;
  const auto id = srv.create("baseline");
  const json good = {{"rewrite_fraction", "<=25%"},
                     {"likert", likert({{"Quality", 4}, {"Burdened(R)", 2}})},
                     {"re_rating", 4},
                     {"posting_frequency", "never"}};
  CHECK(srv.post("/sessions/ffff/feedback", good).status == 404);
  CHECK(srv.post("/sessions/" + id + "/feedback", good).status == 409);
  srv.run_to_end(id);
  srv.post("/sessions/" + id + "/finalize");

  auto bad_label = srv.post("/sessions/" + id + "/feedback",
                            json{{"rewrite_fraction", "none"}, {"likert", likert({{"Speed", 4}})}});
  CHECK(bad_label.status == 422);
  CHECK(bad_label.body["error"] == "InvalidLikertLabel");
  CHECK(srv.post("/sessions/" + id + "/feedback", json{{"rewrite_fraction", "none"}, {"likert", likert({{"Quality", 9}})}})
            .status == 422);
  CHECK_FALSE(srv.store->get(id).feedback);

  auto ok = srv.post("/sessions/" + id + "/feedback", good);
  CHECK(ok.status == 200);
  CHECK(ok.body["stored"] == true);
  CHECK(ok.body["feedback"]["likert"][0]["arm"] == "baseline");
  CHECK(ok.body["feedback"]["likert"][0]["never_reviewed"] == true);

  auto exported = srv.get("/export/feedback");
  CHECK(exported.body.size() == 1);
  auto tsv = srv.get("/export/feedback?format=tsv");
  std::istringstream in(tsv.raw);
  const auto rows = load_likert(in, "http");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].item == LikertItem::BurdenedR);
  CHECK(rows[1].never_reviewed);
}

TEST_CASE("exports list sessions and reviews") {
  LiveServer srv;
  const auto a = srv.create();
  srv.create();
  srv.run_to_end(a);
  srv.post("/sessions/" + a + "/finalize");
  auto sessions = srv.get("/export/sessions");
  CHECK(sessions.status == 200);
  CHECK(sessions.body.size() == 2);
  auto reviews = srv.get("/export/reviews");
  REQUIRE(reviews.body.size() == 1);
  CHECK(reviews.body[0]["session_id"] == a);
  CHECK(reviews.body[0]["rating"] == 3);
  CHECK(reviews.body[0]["policy"] == "adaptive");
}
