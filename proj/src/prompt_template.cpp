#include "revint/prompt_template.hpp"

#include "revint/error.hpp"

namespace revint {

namespace {

bool is_name_char(char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }

// Length of the placeholder token starting at text[pos] == '[', or 0.
std::size_t placeholder_at(std::string_view text, std::size_t pos) {
  if (pos + 2 >= text.size() || text[pos] != '[') return 0;
  if (!(text[pos + 1] >= 'A' && text[pos + 1] <= 'Z')) return 0;
  std::size_t i = pos + 1;
  while (i < text.size() && is_name_char(text[i])) ++i;
  if (i < text.size() && text[i] == ']') return i - pos + 1;
  return 0;
}

}  // namespace

std::set<std::string> PromptTemplate::scan(std::string_view text) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (auto len = placeholder_at(text, i)) {
      names.emplace(text.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return names;
}

PromptTemplate::PromptTemplate(std::string body, std::set<std::string> placeholders)
    : body_(std::move(body)), placeholders_(std::move(placeholders)) {
  for (const auto& name : scan(body_)) {
    if (!placeholders_.count(name))
      fail(ErrorCode::PreconditionViolated, "undeclared placeholder [" + name + "] in template");
  }
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
  std::string out;
  out.reserve(body_.size());
  std::string_view body = body_;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (auto len = placeholder_at(body, i)) {
      std::string name(body.substr(i + 1, len - 2));
      auto it = bindings.find(name);
      if (it == bindings.end())
        fail(ErrorCode::PreconditionViolated, "placeholder [" + name + "] is unbound");
      out += it->second;
      i += len - 1;
    } else {
      out += body[i];
    }
  }
  return out;
}

}  // namespace revint
