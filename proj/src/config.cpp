#include "revint/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "revint/error.hpp"
#include "revint/text.hpp"

namespace revint {

using nlohmann::json;

namespace {

struct Field {
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

int to_int(std::string_view key, std::string_view v) {
  v = text::trim(v);
  int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    fail(ErrorCode::InvalidConfig, std::string(key) + ": '" + std::string(v) + "' is not an integer");
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(text::trim(v));
  try {
    std::size_t used = 0;
    double out = std::stod(s, &used);
    if (used == s.size()) return out;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::InvalidConfig, std::string(key) + ": '" + s + "' is not a number");
}

std::string fmt(double v) { return json(v).dump(); }

template <auto Member>
Field str_field() {
  return {[](Config& c, std::string_view v) { c.*Member = std::string(v); },
          [](const Config& c) { return c.*Member; }};
}

template <auto Member>
Field int_field(const char* key) {
  return {[key](Config& c, std::string_view v) { c.*Member = to_int(key, v); },
          [](const Config& c) { return std::to_string(c.*Member); }};
}

template <auto Member>
Field real_field(const char* key) {
  return {[key](Config& c, std::string_view v) { c.*Member = to_double(key, v); },
          [](const Config& c) { return fmt(c.*Member); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"backend", str_field<&Config::backend>()},
      {"api_url", str_field<&Config::api_url>()},
      {"api_key", str_field<&Config::api_key>()},
      {"model", str_field<&Config::model>()},
      {"cassette", str_field<&Config::cassette>()},
      {"script", str_field<&Config::script>()},
      {"timeout_s", int_field<&Config::timeout_s>("timeout_s")},
      {"retry_backoff_ms", int_field<&Config::retry_backoff_ms>("retry_backoff_ms")},
      {"interview.temperature", real_field<&Config::interview_temperature>("interview.temperature")},
      {"interview.min_questions", int_field<&Config::min_questions>("interview.min_questions")},
      {"interview.max_turns", int_field<&Config::max_turns>("interview.max_turns")},
      {"generator.temperature", real_field<&Config::generator_temperature>("generator.temperature")},
      {"predictor.temperature", real_field<&Config::predictor_temperature>("predictor.temperature")},
      {"max_output_tokens", int_field<&Config::max_output_tokens>("max_output_tokens")},
      {"exemplars", str_field<&Config::exemplars>()},
      {"matching.rouge_beta", real_field<&Config::rouge_beta>("matching.rouge_beta")},
      {"matching.top_percent", real_field<&Config::top_percent>("matching.top_percent")},
      {"matching.cutoff_mode", str_field<&Config::cutoff_mode>()},
      {"store", str_field<&Config::store>()},
      {"server.host", str_field<&Config::host>()},
      {"server.port", int_field<&Config::port>("server.port")},
  };
  return table;
}

void flatten(const json& node, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const auto key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object())
      flatten(*it, key, out);
    else
      out.emplace_back(key, *it);
  }
}

}  // namespace

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : fields()) v.push_back(k);
    return v;
  }();
  return names;
}

std::string Config::env_name(std::string_view key) {
  std::string out = "REVINT_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string Config::flag_name(std::string_view key) {
  std::string out;
  for (char c : key) out += (c == '.' || c == '_') ? '-' : c;
  return out;
}

void Config::set(std::string_view key, std::string_view value) {
  auto it = fields().find(key);
  if (it == fields().end()) fail(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
  it->second.set(*this, value);
}

std::string Config::get(std::string_view key) const {
  auto it = fields().find(key);
  if (it == fields().end()) fail(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
  return it->second.get(*this);
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidConfig, "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, path.string() + ": top level must be an object");
  std::vector<std::pair<std::string, json>> flat;
  flatten(doc, "", flat);
  for (const auto& [key, value] : flat)
    set(key, value.is_string() ? value.get<std::string>() : value.dump());
}

void Config::merge_env(const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  const auto get_env = [&](const std::string& name) -> std::optional<std::string> {
    if (lookup) return lookup(name);
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
  for (const auto& key : keys())
    if (auto v = get_env(env_name(key))) set(key, *v);
}

void Config::validate() const {
  if (backend != "live" && backend != "record" && backend != "replay" && backend != "scripted")
    fail(ErrorCode::InvalidConfig, "backend must be live, record, replay or scripted");
  if (cutoff_mode != "within_filtered" && cutoff_mode != "global")
    fail(ErrorCode::InvalidConfig, "matching.cutoff_mode must be within_filtered or global");
  for (double t : {interview_temperature, generator_temperature, predictor_temperature})
    if (!(t >= 0.0 && t <= 2.0)) fail(ErrorCode::InvalidConfig, "temperatures must lie in [0, 2]");
  if (!(rouge_beta > 0.0)) fail(ErrorCode::InvalidConfig, "matching.rouge_beta must be positive");
  if (!(top_percent > 0.0 && top_percent <= 100.0))
    fail(ErrorCode::InvalidConfig, "matching.top_percent must lie in (0, 100]");
  if (timeout_s <= 0 || retry_backoff_ms < 0)
    fail(ErrorCode::InvalidConfig, "timeout_s must be positive and retry_backoff_ms non-negative");
  if (port < 0 || port > 65535) fail(ErrorCode::InvalidConfig, "server.port outside 0..65535");
  interview_config(Policy::adaptive).validate();
}

InterviewConfig Config::interview_config(Policy policy) const {
  return {min_questions, max_turns, interview_temperature, max_output_tokens, policy};
}

GenerationParams Config::generator_params() const { return {generator_temperature, max_output_tokens}; }
GenerationParams Config::predictor_params() const { return {predictor_temperature, max_output_tokens}; }

SelectionOptions Config::selection_options() const {
  return {top_percent, cutoff_mode == "global" ? CutoffMode::global : CutoffMode::within_filtered,
          rouge_beta};
}

RetryPolicy Config::retry_policy() const { return {1, std::chrono::milliseconds(retry_backoff_ms)}; }

std::shared_ptr<ChatBackend> make_backend(const Config& config) {
  const auto remote = [&] {
    if (config.api_key.empty())
      fail(ErrorCode::BackendUnavailable, "no credential: set " + Config::env_name("api_key"));
    return std::make_shared<RemoteBackend>(
        RemoteEndpoint{config.api_url, config.api_key, config.model, std::chrono::seconds(config.timeout_s)});
  };
  if (config.backend == "live") return remote();
  if (config.backend == "record")
    return std::make_shared<RecordingBackend>(remote(), std::make_shared<Cassette>(config.cassette));
  if (config.backend == "replay")
    return std::make_shared<ReplayBackend>(Cassette::load(config.cassette));
  if (config.backend == "scripted") {
    std::ifstream in(config.script, std::ios::binary);
    if (!in) fail(ErrorCode::InvalidConfig, "cannot open script file '" + config.script + "'");
    try {
      return std::make_shared<ScriptedBackend>(json::parse(in).get<std::vector<std::string>>());
    } catch (const json::exception& e) {
      fail(ErrorCode::InvalidConfig, config.script + ": " + e.what());
    }
  }
  fail(ErrorCode::InvalidConfig, "unknown backend '" + config.backend + "'");
}

}  // namespace revint
