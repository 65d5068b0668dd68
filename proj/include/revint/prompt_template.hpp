#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace revint {

/// Text with bracketed upper-case placeholders such as [PRODUCT_NAME].
/// Control tokens like [Wait_for_Response] contain lower-case letters and are
/// not placeholders.
class PromptTemplate {
 public:
  /// Throws PreconditionViolated if the body uses a placeholder that is not
  /// declared.
  PromptTemplate(std::string body, std::set<std::string> placeholders);

  /// Single-pass substitution; bound values are never rescanned. Every
  /// placeholder occurring in the body must be bound.
  std::string render(const std::map<std::string, std::string>& bindings) const;

  const std::string& body() const noexcept { return body_; }
  const std::set<std::string>& placeholders() const noexcept { return placeholders_; }

  /// Names of all placeholder tokens appearing in `text`.
  static std::set<std::string> scan(std::string_view text);

 private:
  std::string body_;
  std::set<std::string> placeholders_;
};

}  // namespace revint
