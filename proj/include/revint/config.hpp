#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revint/corpus_matching.hpp"
#include "revint/gateway.hpp"
#include "revint/interviewer.hpp"

namespace revint {

/// Runtime settings. Keys are dotted names ("interview.max_turns"); the JSON
/// config file nests them as objects, environment variables spell them
/// REVINT_INTERVIEW_MAX_TURNS and CLI flags --interview-max-turns.
/// Precedence: flag > env > file > default.
struct Config {
  std::string backend = "replay";  // live | record | replay | scripted
  std::string api_url = "https://api.openai.com/v1/chat/completions";
  std::string api_key;
  std::string model = "gpt-4-0613";
  std::string cassette = "cassettes/session.jsonl";
  std::string script;  // JSON array of responses, scripted backend only
  int timeout_s = 60;
  int retry_backoff_ms = 500;

  double interview_temperature = kInterviewTemperature;
  int min_questions = 8;
  int max_turns = 15;
  double generator_temperature = kGeneratorTemperature;
  double predictor_temperature = kPredictorTemperature;
  int max_output_tokens = kDefaultMaxOutputTokens;

  std::string exemplars = "data/rating_exemplars.json";
  double rouge_beta = kRougeBeta;
  double top_percent = 5.0;
  std::string cutoff_mode = "within_filtered";  // within_filtered | global

  std::string store = "revint-store.jsonl";
  std::string host = "127.0.0.1";
  int port = 8080;

  /// Assigns one key from its textual form. Throws InvalidConfig on an
  /// unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  void merge_file(const std::filesystem::path& path);
  /// `lookup` returns the variable's value or nullopt; defaults to getenv.
  void merge_env(const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

  void validate() const;

  InterviewConfig interview_config(Policy policy) const;
  GenerationParams generator_params() const;
  GenerationParams predictor_params() const;
  SelectionOptions selection_options() const;
  RetryPolicy retry_policy() const;

  static const std::vector<std::string>& keys();
  static std::string env_name(std::string_view key);
  static std::string flag_name(std::string_view key);
};

/// Backend named by config.backend. `live` and `record` need api_url and a
/// credential; `replay` reads config.cassette; `scripted` reads config.script.
std::shared_ptr<ChatBackend> make_backend(const Config& config);

}  // namespace revint
