#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace revint {

enum class Role { system, assistant, user };

std::string_view to_string(Role role) noexcept;
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct GenerationParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;

  bool operator==(const GenerationParams&) const = default;
};

// Stage defaults. Overridable through Config.
inline constexpr double kInterviewTemperature = 0.2;
inline constexpr double kGeneratorTemperature = 0.0;
inline constexpr double kPredictorTemperature = 0.0;
inline constexpr int kDefaultMaxOutputTokens = 1024;

/// Throws PreconditionViolated on an empty list, an empty user/assistant
/// message, or parameters out of range.
void validate_request(std::span<const ChatMessage> messages, const GenerationParams& params);

/// Canonical JSON for (messages, params); the cassette key is its SHA-256.
nlohmann::json request_to_json(std::span<const ChatMessage> messages,
                               const GenerationParams& params);
std::string request_key(std::span<const ChatMessage> messages, const GenerationParams& params);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(std::span<const ChatMessage> messages,
                               const GenerationParams& params) = 0;
  /// True when calls may leave the process.
  virtual bool uses_network() const noexcept { return false; }
};

/// Returns predetermined responses in order, ignoring the request.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses);

  std::string complete(std::span<const ChatMessage> messages,
                       const GenerationParams& params) override;

  bool exhausted() const;
  std::size_t cursor() const;
  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::vector<std::string> responses_;
  mutable std::mutex mu_;
  std::size_t cursor_ = 0;
};

struct CassetteEntry {
  std::string key;
  nlohmann::json request;  // as produced by request_to_json
  std::string response;
};

/// Line-delimited JSON file of {key, request, response} records. Later
/// lines win on load; recording a duplicate key rewrites the file.
class Cassette {
 public:
  Cassette() = default;
  explicit Cassette(std::filesystem::path path);  // loads if the file exists

  /// Like the constructor but the file must exist.
  static std::shared_ptr<Cassette> load(const std::filesystem::path& path);

  std::optional<std::string> find(const std::string& key) const;
  void record(std::span<const ChatMessage> messages, const GenerationParams& params,
              const std::string& response);

  std::size_t size() const;
  std::vector<CassetteEntry> entries() const;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void parse_file();
  void append_line(const CassetteEntry& entry) const;
  void rewrite_file() const;

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<CassetteEntry> entries_;       // insertion order
  std::map<std::string, std::size_t> index_;  // key -> entries_ slot
};

/// Serves completions from a cassette. Never touches the network; a request
/// without a recording raises ReplayMiss.
class ReplayBackend final : public ChatBackend {
 public:
  explicit ReplayBackend(std::shared_ptr<const Cassette> cassette);
  std::string complete(std::span<const ChatMessage> messages,
                       const GenerationParams& params) override;

 private:
  std::shared_ptr<const Cassette> cassette_;
};

/// Forwards to an inner backend and records every successful exchange.
class RecordingBackend final : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<Cassette> cassette);
  std::string complete(std::span<const ChatMessage> messages,
                       const GenerationParams& params) override;
  bool uses_network() const noexcept override { return inner_->uses_network(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::shared_ptr<Cassette> cassette_;
};

struct RemoteEndpoint {
  std::string url;  // full chat-completions URL, e.g. https://host/v1/chat/completions
  std::string api_key;
  std::string model = "gpt-4-0613";
  std::chrono::seconds timeout{60};
};

/// OpenAI-compatible chat-completions client.
class RemoteBackend final : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteEndpoint endpoint);
  std::string complete(std::span<const ChatMessage> messages,
                       const GenerationParams& params) override;
  bool uses_network() const noexcept override { return true; }

 private:
  RemoteEndpoint endpoint_;
  std::string scheme_host_port_;
  std::string path_;
};

struct RetryPolicy {
  int retries = 1;
  std::chrono::milliseconds backoff{500};
};

/// Uniform entry point for every pipeline stage. Validates the request,
/// forwards it unmodified and retries once on a transient failure.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy retry = {});

  std::string complete_chat(std::span<const ChatMessage> messages,
                            const GenerationParams& params) const;

  std::size_t calls() const;
  ChatBackend& backend() const noexcept { return *backend_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy retry_;
  mutable std::mutex stats_mu_;
  mutable std::size_t calls_ = 0;
};

}  // namespace revint
