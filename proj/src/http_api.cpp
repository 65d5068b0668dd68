#include "revint/http_api.hpp"

#include <httplib.h>

#include "revint/log.hpp"
#include "revint/serialization.hpp"
#include "revint/text.hpp"

namespace revint {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PreconditionViolated:
    case ErrorCode::EmptyProductTitle:
    case ErrorCode::EmptyUserMessage:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InputFormat:
      return 400;
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::SessionNotActive:
    case ErrorCode::SessionNotTerminal:
    case ErrorCode::NotFinalized:
      return 409;
    case ErrorCode::InvalidLikertLabel:
    case ErrorCode::InvalidFeedback:
      return 422;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::ScriptExhausted:
    case ErrorCode::Timeout:
    case ErrorCode::ReplayMiss:
    case ErrorCode::EmptyUtterance:
    case ErrorCode::EmptyCompletion:
    case ErrorCode::NoRatingFound:
    case ErrorCode::RatingOutOfRange:
      return 502;
    default:
      return 500;
  }
}

json turn_json(const TurnView& view) {
  return {{"index", view.turn.index},
          {"text", view.turn.text},
          {"awaits_response", view.turn.awaits_response},
          {"ends_interview", view.turn.ends_interview},
          {"timestamp", view.turn.timestamp},
          {"question_count", view.question_count},
          {"final_question", view.final_question}};
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  if (text::is_blank(req.body)) return json::object();
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) fail(ErrorCode::InputFormat, "request body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    fail(ErrorCode::InputFormat, std::string("malformed JSON: ") + e.what());
  }
}

std::string string_field(const json& body, const char* key, const std::string& fallback = "") {
  if (!body.contains(key) || body.at(key).is_null()) return fallback;
  if (!body.at(key).is_string()) fail(ErrorCode::InputFormat, std::string(key) + " must be a string");
  return body.at(key).get<std::string>();
}

/// Runs a handler, translating library errors into JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      const int status = http_status(e.code());
      if (status >= 500) log::warn(std::string(req.method) + " " + req.path + ": " + e.what());
      send_error(res, status, to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      log::warn(std::string(req.method) + " " + req.path + ": " + e.what());
      send_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, ReviewService& service) {
  server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    ProductRef product{string_field(body, "product_title"), string_field(body, "category"),
                       string_field(body, "external_id")};
    const auto policy = policy_from_string(string_field(body, "policy", "adaptive"));
    const auto created = service.create_session(product, policy);
    send_json(res, 201,
              {{"session_id", created.session_id},
               {"policy", std::string(to_string(policy))},
               {"status", "active"},
               {"first_question", turn_json(created.first)}});
  }));

  server.Post(R"(/sessions/([0-9a-f]+)/messages)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const auto result = service.post_message(req.matches[1], string_field(body, "text"));
                json out = {{"terminal", result.terminal},
                            {"status", std::string(to_string(result.status))},
                            {"review_pending", result.review_pending}};
                if (result.next) out["next_question"] = turn_json(*result.next);
                send_json(res, 200, out);
              }));

  server.Post(R"(/sessions/([0-9a-f]+)/finalize)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto result = service.finalize(req.matches[1]);
                send_json(res, 200,
                          {{"session_id", result.review.session_id},
                           {"review_body", result.review.body},
                           {"rating", result.rating.rating},
                           {"reasoning", result.rating.reasoning},
                           {"cached", result.cached}});
              }));

  server.Get(R"(/sessions/([0-9a-f]+))",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto stored = service.get(req.matches[1]);
               json out = {{"session", stored.session}, {"finalized", stored.finalized()}};
               if (stored.review) out["review"] = *stored.review;
               if (stored.rating) out["rating"] = *stored.rating;
               if (stored.feedback) out["feedback"] = *stored.feedback;
               send_json(res, 200, out);
             }));

  server.Post(R"(/sessions/([0-9a-f]+)/feedback)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                service.get(id);  // unknown session is 404 before the body is judged
                auto record = parse_body(req).get<FeedbackRecord>();
                const auto stored = service.submit_feedback(id, std::move(record));
                send_json(res, 200, {{"stored", true}, {"feedback", stored}});
              }));

  server.Get(R"(/export/(sessions|reviews|feedback))",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const std::string what = req.matches[1];
               if (what == "sessions") return send_json(res, 200, export_sessions(service.store()));
               if (what == "reviews") return send_json(res, 200, export_reviews(service.store()));
               if (req.get_param_value("format") == "tsv") {
                 res.status = 200;
                 res.set_content(export_likert_tsv(service.store()), "text/tab-separated-values; charset=utf-8");
                 return;
               }
               send_json(res, 200, export_feedback(service.store()));
             }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_error(res, res.status, "NotFound", "no such endpoint");
  });
}

}  // namespace revint
