#pragma once

#include <nlohmann/json.hpp>

#include "revint/error.hpp"
#include "revint/service.hpp"

namespace httplib {
class Server;
}

namespace revint {

/// HTTP status for a library error: 400 bad input, 404 unknown session,
/// 409 wrong session state, 422 invalid feedback, 502 backend failure,
/// 500 otherwise.
int http_status(ErrorCode code) noexcept;

nlohmann::json turn_json(const TurnView& view);

/// Installs the JSON endpoints:
///   POST /sessions                    {product_title, policy?, category?, external_id?}
///   POST /sessions/{id}/messages      {text}
///   POST /sessions/{id}/finalize
///   GET  /sessions/{id}
///   POST /sessions/{id}/feedback      FeedbackRecord
///   GET  /export/{sessions|reviews|feedback}   (?format=tsv on feedback: Likert TSV)
/// Errors are returned as {"error": code, "message": text}.
void register_routes(httplib::Server& server, ReviewService& service);

}  // namespace revint
