#include "revint/gateway.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/sha.h>

#include "revint/error.hpp"
#include "revint/log.hpp"

namespace revint {

using nlohmann::json;

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::system: return "system";
    case Role::assistant: return "assistant";
    case Role::user: return "user";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "assistant") return Role::assistant;
  if (s == "user") return Role::user;
  fail(ErrorCode::PreconditionViolated, "unknown role '" + std::string(s) + "'");
}

void validate_request(std::span<const ChatMessage> messages, const GenerationParams& params) {
  if (messages.empty()) fail(ErrorCode::PreconditionViolated, "message list is empty");
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& m = messages[i];
    if (m.role != Role::system && m.content.empty())
      fail(ErrorCode::PreconditionViolated,
           "message " + std::to_string(i) + " (" + std::string(to_string(m.role)) +
               ") has empty content");
  }
  if (!(params.temperature >= 0.0 && params.temperature <= 2.0))
    fail(ErrorCode::PreconditionViolated, "temperature must lie in [0, 2]");
  if (params.max_output_tokens <= 0)
    fail(ErrorCode::PreconditionViolated, "max_output_tokens must be positive");
}

json request_to_json(std::span<const ChatMessage> messages, const GenerationParams& params) {
  json msgs = json::array();
  for (const auto& m : messages)
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  return {{"messages", std::move(msgs)},
          {"params",
           {{"temperature", params.temperature},
            {"max_output_tokens", params.max_output_tokens}}}};
}

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned char b : digest) out << std::setw(2) << static_cast<int>(b);
  return out.str();
}

}  // namespace

std::string request_key(std::span<const ChatMessage> messages, const GenerationParams& params) {
  // json::dump orders object keys, so the serialization is canonical.
  return sha256_hex(request_to_json(messages, params).dump());
}

// --- ScriptedBackend -------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedBackend::complete(std::span<const ChatMessage>, const GenerationParams&) {
  std::lock_guard lock(mu_);
  if (cursor_ >= responses_.size())
    fail(ErrorCode::ScriptExhausted,
         "scripted backend has no response left (" + std::to_string(responses_.size()) +
             " consumed)");
  return responses_[cursor_++];
}

bool ScriptedBackend::exhausted() const {
  std::lock_guard lock(mu_);
  return cursor_ >= responses_.size();
}

std::size_t ScriptedBackend::cursor() const {
  std::lock_guard lock(mu_);
  return cursor_;
}

// --- Cassette --------------------------------------------------------------

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) parse_file();
}

std::shared_ptr<Cassette> Cassette::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::CassetteParseError, "cassette not found: " + path.string());
  return std::make_shared<Cassette>(path);
}

void Cassette::parse_file() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) fail(ErrorCode::CassetteParseError, "cannot open cassette " + path_.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    CassetteEntry entry;
    try {
      auto rec = json::parse(line);
      entry.key = rec.at("key").get<std::string>();
      entry.request = rec.at("request");
      entry.response = rec.at("response").get<std::string>();
    } catch (const json::exception& e) {
      fail(ErrorCode::CassetteParseError,
           path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto it = index_.find(entry.key);
    if (it != index_.end()) {
      entries_[it->second] = std::move(entry);
    } else {
      index_.emplace(entry.key, entries_.size());
      entries_.push_back(std::move(entry));
    }
  }
}

std::optional<std::string> Cassette::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].response;
}

void Cassette::record(std::span<const ChatMessage> messages, const GenerationParams& params,
                      const std::string& response) {
  CassetteEntry entry{request_key(messages, params), request_to_json(messages, params), response};
  std::lock_guard lock(mu_);
  auto it = index_.find(entry.key);
  if (it != index_.end()) {
    log::warn("cassette: overwriting existing entry " + entry.key);
    entries_[it->second] = std::move(entry);
    if (!path_.empty()) rewrite_file();
    return;
  }
  index_.emplace(entry.key, entries_.size());
  entries_.push_back(entry);
  if (!path_.empty()) append_line(entry);
}

namespace {
std::string entry_line(const CassetteEntry& e) {
  return json{{"key", e.key}, {"request", e.request}, {"response", e.response}}.dump() + "\n";
}
}  // namespace

void Cassette::append_line(const CassetteEntry& entry) const {
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::StorageFailure, "cannot open cassette for append: " + path_.string());
  out << entry_line(entry);
  out.flush();
  if (!out) fail(ErrorCode::StorageFailure, "write failed: " + path_.string());
}

void Cassette::rewrite_file() const {
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    for (const auto& e : entries_) out << entry_line(e);
    out.flush();
    if (!out) fail(ErrorCode::StorageFailure, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) fail(ErrorCode::StorageFailure, "rename failed: " + ec.message());
}

std::size_t Cassette::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::vector<CassetteEntry> Cassette::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

// --- Replay / Recording ----------------------------------------------------

ReplayBackend::ReplayBackend(std::shared_ptr<const Cassette> cassette)
    : cassette_(std::move(cassette)) {}

std::string ReplayBackend::complete(std::span<const ChatMessage> messages,
                                    const GenerationParams& params) {
  const auto key = request_key(messages, params);
  if (auto hit = cassette_->find(key)) return *hit;
  fail(ErrorCode::ReplayMiss, "no recorded exchange for request " + key);
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner,
                                   std::shared_ptr<Cassette> cassette)
    : inner_(std::move(inner)), cassette_(std::move(cassette)) {}

std::string RecordingBackend::complete(std::span<const ChatMessage> messages,
                                       const GenerationParams& params) {
  auto response = inner_->complete(messages, params);
  cassette_->record(messages, params, response);
  return response;
}

// --- RemoteBackend ---------------------------------------------------------

RemoteBackend::RemoteBackend(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  const auto& url = endpoint_.url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    fail(ErrorCode::PreconditionViolated, "endpoint URL lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
    path_ = "/v1/chat/completions";
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

std::string RemoteBackend::complete(std::span<const ChatMessage> messages,
                                    const GenerationParams& params) {
  json body = request_to_json(messages, params);
  json payload = {{"model", endpoint_.model},
                  {"messages", body["messages"]},
                  {"temperature", params.temperature},
                  {"max_tokens", params.max_output_tokens}};

  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(endpoint_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);

  auto res = client.Post(path_, headers, payload.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout)
      fail(ErrorCode::Timeout, "backend request timed out: " + httplib::to_string(err));
    fail(ErrorCode::BackendUnavailable, "backend request failed: " + httplib::to_string(err));
  }
  if (res->status != 200)
    fail(ErrorCode::BackendUnavailable,
         "backend returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  try {
    auto reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string("malformed backend reply: ") + e.what());
  }
}

// --- Gateway ---------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy retry)
    : backend_(std::move(backend)), retry_(retry) {
  if (!backend_) fail(ErrorCode::PreconditionViolated, "gateway requires a backend");
}

std::string Gateway::complete_chat(std::span<const ChatMessage> messages,
                                   const GenerationParams& params) const {
  validate_request(messages, params);
  for (int attempt = 0;; ++attempt) {
    {
      std::lock_guard lock(stats_mu_);
      ++calls_;
    }
    try {
      return backend_->complete(messages, params);
    } catch (const Error& e) {
      if (!e.transient() || attempt >= retry_.retries) throw;
      log::warn(std::string("gateway: transient failure, retrying: ") + e.what());
      std::this_thread::sleep_for(retry_.backoff * (attempt + 1));
    }
  }
}

std::size_t Gateway::calls() const {
  std::lock_guard lock(stats_mu_);
  return calls_;
}

}  // namespace revint
